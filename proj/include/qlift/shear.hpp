#pragma once

// Involutive test systems: pull the coordinate system (p_1..p_n) back under a
// composition of elementary canonical shears
//
//     position shear S(q):  (q, p) -> (q, p + grad S(q))
//     momentum shear T(p):  (q, p) -> (q + grad T(p), p)
//
// Each step substitutes into the current tuple, so brackets are preserved.

#include <qlift/weyl.hpp>

#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace qlift {

struct ShearStep {
    enum class Kind { position, momentum };
    Kind kind;
    Poly generator;  // a polynomial in q only (position) or p only (momentum)
};

inline std::vector<Poly> gen_involutive_shear(std::size_t pairs, std::span<const ShearStep> steps) {
    std::vector<Poly> fs;
    for (std::size_t i = 0; i < pairs; ++i) fs.push_back(Poly::variable(pairs, Var::p(i)));

    for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto& step = steps[s];
        const bool position = step.kind == ShearStep::Kind::position;
        if (step.generator.pairs() != pairs) throw std::invalid_argument("shear generator has wrong number of pairs");
        for (std::size_t i = 0; i < pairs; ++i) {
            const Var forbidden = position ? Var::p(i) : Var::q(i);
            if (step.generator.degree_in(forbidden) > 0)
                throw std::invalid_argument("shear step " + std::to_string(s + 1) + " mentions forbidden variable " +
                                            forbidden.name());
        }
        std::vector<Poly> images;
        for (std::size_t slot = 0; slot < 2 * pairs; ++slot)
            images.push_back(Poly::variable(pairs, Var::from_slot(slot, pairs)));
        for (std::size_t i = 0; i < pairs; ++i) {
            // p_i -> p_i + dS/dq_i, or q_i -> q_i + dT/dp_i
            const Var moved = position ? Var::p(i) : Var::q(i);
            images[moved.slot(pairs)] += step.generator.derivative(moved.conjugate());
        }
        for (auto& f : fs) f = substitute(f, images);
    }
    if (auto check = is_involutive(fs); !check)
        throw std::logic_error("shear pullback is not involutive; substitution bug");
    return fs;
}

/// Random generator polynomial in the q's (or p's) with small integer coefficients.
template <class Rng>
Poly random_shear_generator(std::size_t pairs, ShearStep::Kind kind, unsigned max_degree, unsigned terms, Rng& rng) {
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<unsigned> deg(2, std::max(2u, max_degree));
    std::uniform_int_distribution<std::size_t> var(0, pairs - 1);
    Poly g(pairs);
    for (unsigned t = 0; t < terms; ++t) {
        Exponent e(2 * pairs, 0);
        const unsigned d = deg(rng);
        for (unsigned k = 0; k < d; ++k) {
            const std::size_t i = var(rng);
            ++e[(kind == ShearStep::Kind::position ? Var::q(i) : Var::p(i)).slot(pairs)];
        }
        int c = coeff(rng);
        if (c == 0) c = 1;
        g += Poly::monomial(pairs, std::move(e), Rational(c));
    }
    return g;
}

/// Alternating position/momentum steps, starting with a position shear.
template <class Rng>
std::vector<ShearStep> random_shear_steps(std::size_t pairs, std::size_t count, Rng& rng, unsigned q_degree = 3,
                                          unsigned p_degree = 2, unsigned terms = 2) {
    std::vector<ShearStep> steps;
    for (std::size_t s = 0; s < count; ++s) {
        const auto kind = s % 2 == 0 ? ShearStep::Kind::position : ShearStep::Kind::momentum;
        const unsigned d = kind == ShearStep::Kind::position ? q_degree : p_degree;
        steps.push_back({kind, random_shear_generator(pairs, kind, d, terms, rng)});
    }
    return steps;
}

}  // namespace qlift
