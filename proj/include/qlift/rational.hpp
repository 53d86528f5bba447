#pragma once

#include <gmpxx.h>

#include <string>

namespace qlift {

/// Exact rational scalar. Always kept in canonical (reduced) form.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational factorial(unsigned k) {
    Integer f = 1;
    for (unsigned i = 2; i <= k; ++i) f *= i;
    return Rational(f);
}

}  // namespace qlift
