#pragma once

#include <qlift/rational.hpp>

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qlift {

/// A coordinate of C^{2n}: either a position q_i or a momentum p_i.
/// Indices are 0-based; q(0) prints as "q1".
class Var {
public:
    static constexpr Var q(std::size_t i) { return Var(false, i); }
    static constexpr Var p(std::size_t i) { return Var(true, i); }

    /// Slot layout of exponent vectors: q_1..q_n then p_1..p_n.
    static constexpr Var from_slot(std::size_t slot, std::size_t pairs) {
        return slot < pairs ? q(slot) : p(slot - pairs);
    }

    constexpr bool is_momentum() const { return momentum_; }
    constexpr std::size_t index() const { return index_; }
    constexpr std::size_t slot(std::size_t pairs) const { return momentum_ ? pairs + index_ : index_; }

    /// The conjugate coordinate (q_i <-> p_i).
    constexpr Var conjugate() const { return Var(!momentum_, index_); }

    std::string name() const { return (momentum_ ? "p" : "q") + std::to_string(index_ + 1); }

    friend constexpr bool operator==(Var, Var) = default;

private:
    constexpr Var(bool momentum, std::size_t index) : momentum_(momentum), index_(index) {}
    bool momentum_;
    std::size_t index_;
};

using Exponent = std::vector<unsigned>;

inline unsigned total_degree(const Exponent& e) {
    unsigned d = 0;
    for (unsigned x : e) d += x;
    return d;
}

/// Graded lexicographic order with q1 < ... < qn < p1 < ... < pn:
/// total degree first, then the exponent of the largest variable decides.
struct GrlexLess {
    bool operator()(const Exponent& a, const Exponent& b) const {
        const unsigned da = total_degree(a);
        const unsigned db = total_degree(b);
        if (da != db) return da < db;
        for (std::size_t k = a.size(); k-- > 0;) {
            if (a[k] != b[k]) return a[k] < b[k];
        }
        return false;
    }
};

/// Sparse polynomial in q_1..q_n, p_1..p_n with rational coefficients.
/// No stored coefficient is zero, so term-map equality is polynomial equality.
class Poly {
public:
    using Terms = std::map<Exponent, Rational, GrlexLess>;

    explicit Poly(std::size_t pairs) : pairs_(pairs) {
        if (pairs == 0) throw std::invalid_argument("polynomial needs at least one q/p pair");
    }

    static Poly constant(std::size_t pairs, const Rational& c) {
        Poly r(pairs);
        if (c != 0) r.terms_.emplace(Exponent(2 * pairs, 0), c);
        return r;
    }

    static Poly variable(std::size_t pairs, Var v) {
        check_var(pairs, v);
        Exponent e(2 * pairs, 0);
        e[v.slot(pairs)] = 1;
        return monomial(pairs, std::move(e), Rational(1));
    }

    static Poly monomial(std::size_t pairs, Exponent e, const Rational& c) {
        if (e.size() != 2 * pairs) throw std::invalid_argument("exponent vector length must be 2n");
        Poly r(pairs);
        if (c != 0) r.terms_.emplace(std::move(e), c);
        return r;
    }

    std::size_t pairs() const { return pairs_; }
    std::size_t num_vars() const { return 2 * pairs_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    /// Total degree; the zero polynomial reports -1.
    int degree() const { return terms_.empty() ? -1 : static_cast<int>(total_degree(terms_.rbegin()->first)); }

    int degree_in(Var v) const {
        check_var(pairs_, v);
        int d = terms_.empty() ? -1 : 0;
        for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[v.slot(pairs_)]));
        return d;
    }

    /// True for zero and for polynomials whose terms all share one total degree.
    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        return total_degree(terms_.begin()->first) == total_degree(terms_.rbegin()->first);
    }

    bool is_constant() const { return degree() <= 0; }

    Rational coefficient(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational constant_term() const { return coefficient(Exponent(num_vars(), 0)); }

    Poly& operator+=(const Poly& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) accumulate(e, c);
        return *this;
    }

    Poly& operator-=(const Poly& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) accumulate(e, -c);
        return *this;
    }

    Poly& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a) { return a *= Rational(-1); }
    friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
    friend Poly operator*(const Rational& s, Poly a) { return a *= s; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_same(b);
        Poly r(a.pairs_);
        Exponent e(a.num_vars());
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
                r.accumulate(e, ca * cb);
            }
        }
        return r;
    }

    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.pairs_ == b.pairs_ && a.terms_ == b.terms_; }

    Poly pow(unsigned k) const {
        Poly result = constant(pairs_, Rational(1));
        Poly base = *this;
        while (k) {
            if (k & 1u) result *= base;
            k >>= 1u;
            if (k) base *= base;
        }
        return result;
    }

    /// Formal partial derivative with respect to v.
    Poly derivative(Var v) const {
        check_var(pairs_, v);
        const std::size_t s = v.slot(pairs_);
        Poly r(pairs_);
        for (const auto& [e, c] : terms_) {
            if (e[s] == 0) continue;
            Exponent d = e;
            --d[s];
            r.terms_.emplace_hint(r.terms_.end(), std::move(d), c * e[s]);
        }
        return r;
    }

    /// k-fold partial derivative.
    Poly derivative(Var v, unsigned k) const {
        Poly r = *this;
        for (unsigned i = 0; i < k && !r.is_zero(); ++i) r = r.derivative(v);
        return r;
    }

    /// Keeps only the terms of total degree d.
    Poly homogeneous_part(unsigned d) const {
        Poly r(pairs_);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) == d) r.terms_.emplace(e, c);
        return r;
    }

    /// Adds c * x^e in place; drops the term if it cancels.
    void accumulate(const Exponent& e, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    static void check_var(std::size_t pairs, Var v) {
        if (v.index() >= pairs) throw std::invalid_argument("variable " + v.name() + " out of range");
    }

private:
    void check_same(const Poly& o) const {
        if (o.pairs_ != pairs_) throw std::invalid_argument("mismatched number of variable pairs");
    }

    std::size_t pairs_;
    Terms terms_;
};

/// Simultaneous substitution x_k -> images[k] (slot order q1..qn,p1..pn).
inline Poly substitute(const Poly& a, std::span<const Poly> images) {
    if (images.size() != a.num_vars()) throw std::invalid_argument("substitution needs one image per variable");
    const std::size_t pairs = images.front().pairs();
    std::vector<std::vector<Poly>> powers(images.size());
    auto power = [&](std::size_t slot, unsigned k) -> const Poly& {
        auto& cache = powers[slot];
        if (cache.empty()) cache.push_back(Poly::constant(pairs, Rational(1)));
        while (cache.size() <= k) cache.push_back(cache.back() * images[slot]);
        return cache[k];
    };
    Poly r(pairs);
    for (const auto& [e, c] : a.terms()) {
        Poly t = Poly::constant(pairs, c);
        for (std::size_t s = 0; s < e.size(); ++s)
            if (e[s]) t *= power(s, e[s]);
        r += t;
    }
    return r;
}

/// All exponent vectors of the given total degree, ascending in grlex order.
inline std::vector<Exponent> monomials_of_degree(std::size_t num_vars, unsigned degree) {
    std::vector<Exponent> out;
    Exponent e(num_vars, 0);
    // Fill slots from the most significant end so the output comes out sorted.
    auto rec = [&](auto&& self, std::size_t slot, unsigned remaining) -> void {
        if (slot == 0) {
            e[0] = remaining;
            out.push_back(e);
            return;
        }
        for (unsigned k = 0; k <= remaining; ++k) {
            e[slot] = k;
            self(self, slot - 1, remaining - k);
        }
        e[slot] = 0;
    };
    if (num_vars == 0) return out;
    rec(rec, num_vars - 1, degree);
    return out;
}

namespace detail {

inline void format_term(std::ostream& os, std::size_t pairs, const Exponent& e, const Rational& c, bool first) {
    Rational mag = abs(c);
    if (c < 0)
        os << (first ? "-" : " - ");
    else if (!first)
        os << " + ";
    bool need_star = false;
    if (mag != 1 || total_degree(e) == 0) {
        os << mag.get_str();
        need_star = true;
    }
    for (std::size_t s = 0; s < e.size(); ++s) {
        if (e[s] == 0) continue;
        if (need_star) os << '*';
        os << Var::from_slot(s, pairs).name();
        if (e[s] > 1) os << '^' << e[s];
        need_star = true;
    }
}

}  // namespace detail

/// Canonical text: terms in descending grlex order, explicit * and ^.
inline std::string format(const Poly& a) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = a.terms().rbegin(); it != a.terms().rend(); ++it) {
        detail::format_term(os, a.pairs(), it->first, it->second, first);
        first = false;
    }
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Poly& a) { return os << format(a); }

}  // namespace qlift
