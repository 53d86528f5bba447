#pragma once

#include <qlift/hseries.hpp>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlift {

/// {f,g} = sum_i d_{p_i}f d_{q_i}g - d_{q_i}f d_{p_i}g, so that {p,q} = 1.
inline Poly poisson_bracket(const Poly& f, const Poly& g) {
    if (f.pairs() != g.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    Poly r(f.pairs());
    if (f.is_constant() || g.is_constant()) return r;
    for (std::size_t i = 0; i < f.pairs(); ++i) {
        const Poly fp = f.derivative(Var::p(i));
        const Poly fq = f.derivative(Var::q(i));
        if (!fp.is_zero()) r += fp * g.derivative(Var::q(i));
        if (!fq.is_zero()) r -= fq * g.derivative(Var::p(i));
    }
    return r;
}

namespace detail {

// B_k(f,g) = sum_{|a|=k} (1/a!) (X^a f)(Y^a g) for k = 0..max_order, where
// X_i, Y_i are supplied as commuting derivations through apply_x/apply_y.
template <class ApplyX, class ApplyY>
std::vector<Poly> bidifferential_terms(const Poly& f, const Poly& g, std::size_t count, std::size_t max_order,
                                       ApplyX&& apply_x, ApplyY&& apply_y) {
    std::vector<Poly> out(max_order + 1, Poly(f.pairs()));
    if (f.is_zero() || g.is_zero()) return out;
    auto rec = [&](auto&& self, std::size_t i, std::size_t used, const Poly& fx, const Poly& gy,
                   const Rational& weight) -> void {
        if (i == count) {
            out[used] += (fx * gy) * weight;
            return;
        }
        Poly a = fx;
        Poly b = gy;
        Rational w = weight;
        for (unsigned k = 0;; ++k) {
            self(self, i + 1, used + k, a, b, w);
            if (used + k + 1 > max_order) break;
            a = apply_x(i, a);
            if (a.is_zero()) break;
            b = apply_y(i, b);
            if (b.is_zero()) break;
            w /= (k + 1);
        }
    };
    rec(rec, 0, 0, f, g, Rational(1));
    return out;
}

template <class Terms>
HSeries star_from_terms(const HSeries& F, const HSeries& G, Terms&& terms) {
    if (F.pairs() != G.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    if (F.order() != G.order()) throw std::invalid_argument("mismatched truncation orders");
    const std::size_t order = F.order();
    HSeries result(F.pairs(), order);
    std::vector<Poly> acc(order + 1, Poly(F.pairs()));
    for (std::size_t a = 0; a <= order; ++a) {
        if (F[a].is_zero()) continue;
        for (std::size_t b = 0; a + b <= order; ++b) {
            if (G[b].is_zero()) continue;
            auto t = terms(F[a], G[b], order - a - b);
            for (std::size_t k = 0; k < t.size(); ++k)
                if (!t[k].is_zero()) acc[a + b + k] += t[k];
        }
    }
    return HSeries(std::move(acc));
}

}  // namespace detail

/// Coefficients of the normal product of two polynomials up to hbar^max_order:
/// sum over multi-indices a of hbar^{|a|}/a! (d_p^a f)(d_q^a g).
inline std::vector<Poly> normal_product_terms(const Poly& f, const Poly& g, std::size_t max_order) {
    if (f.pairs() != g.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    return detail::bidifferential_terms(
        f, g, f.pairs(), max_order, [](std::size_t i, const Poly& a) { return a.derivative(Var::p(i)); },
        [](std::size_t i, const Poly& b) { return b.derivative(Var::q(i)); });
}

/// Normal star product on R[hbar]/hbar^{L+1}; p*q - q*p = hbar.
inline HSeries star_normal(const HSeries& F, const HSeries& G) {
    return detail::star_from_terms(F, G, [](const Poly& f, const Poly& g, std::size_t max_order) {
        return normal_product_terms(f, g, max_order);
    });
}

/// [F,G] = F*G - G*F (no 1/hbar factor).
inline HSeries star_commutator(const HSeries& F, const HSeries& G) { return star_normal(F, G) - star_normal(G, F); }

struct BracketWitness {
    std::size_t i;
    std::size_t j;
    Poly bracket;
};

struct InvolutivityCheck {
    bool involutive;
    std::optional<BracketWitness> witness;  // first (i<j) with nonzero bracket
    explicit operator bool() const { return involutive; }
};

inline InvolutivityCheck is_involutive(std::span<const Poly> fs) {
    if (fs.empty()) throw std::invalid_argument("involutivity check needs at least one function");
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            Poly b = poisson_bracket(fs[i], fs[j]);
            if (!b.is_zero()) return {false, BracketWitness{i, j, std::move(b)}};
        }
    }
    return {true, std::nullopt};
}

/// Polynomial vector field sum_k c_k d_{x_k}, components in slot order q1..qn,p1..pn.
class VectorField {
public:
    explicit VectorField(std::size_t pairs) : components_(2 * pairs, Poly(pairs)) {}

    explicit VectorField(std::vector<Poly> components) : components_(std::move(components)) {
        if (components_.empty() || components_.size() % 2 != 0)
            throw std::invalid_argument("vector field needs 2n components");
        for (const auto& c : components_)
            if (c.pairs() * 2 != components_.size())
                throw std::invalid_argument("vector field component count does not match 2n");
    }

    /// The coordinate field d_v.
    static VectorField coordinate(std::size_t pairs, Var v) {
        Poly::check_var(pairs, v);
        VectorField r(pairs);
        r.components_[v.slot(pairs)] = Poly::constant(pairs, Rational(1));
        return r;
    }

    std::size_t pairs() const { return components_.size() / 2; }
    const std::vector<Poly>& components() const { return components_; }
    const Poly& component(Var v) const { return components_.at(v.slot(pairs())); }

    bool is_zero() const {
        for (const auto& c : components_)
            if (!c.is_zero()) return false;
        return true;
    }

    /// Derivation X(g) = sum_k c_k d_k g.
    Poly apply(const Poly& g) const {
        if (g.pairs() != pairs()) throw std::invalid_argument("mismatched number of variable pairs");
        Poly r(pairs());
        for (std::size_t s = 0; s < components_.size(); ++s) {
            if (components_[s].is_zero()) continue;
            Poly d = g.derivative(Var::from_slot(s, pairs()));
            if (!d.is_zero()) r += components_[s] * d;
        }
        return r;
    }

    friend VectorField operator+(const VectorField& a, const VectorField& b) {
        std::vector<Poly> c = a.components_;
        for (std::size_t s = 0; s < c.size(); ++s) c[s] += b.components_.at(s);
        return VectorField(std::move(c));
    }

    friend VectorField operator*(const Poly& f, const VectorField& a) {
        std::vector<Poly> c = a.components_;
        for (auto& x : c) x = f * x;
        return VectorField(std::move(c));
    }

    friend bool operator==(const VectorField&, const VectorField&) = default;

private:
    std::vector<Poly> components_;
};

/// [X,Y]^k = X(Y^k) - Y(X^k).
inline VectorField lie_bracket(const VectorField& x, const VectorField& y) {
    if (x.pairs() != y.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    std::vector<Poly> c;
    c.reserve(x.components().size());
    for (std::size_t s = 0; s < x.components().size(); ++s)
        c.push_back(x.apply(y.components()[s]) - y.apply(x.components()[s]));
    return VectorField(std::move(c));
}

/// Hamiltonian field sum_i d_{p_i}H d_{q_i} - d_{q_i}H d_{p_i}; applied to g it gives {H,g}.
inline VectorField hamiltonian_field(const Poly& h) {
    const std::size_t n = h.pairs();
    std::vector<Poly> c(2 * n, Poly(n));
    for (std::size_t i = 0; i < n; ++i) {
        c[Var::q(i).slot(n)] = h.derivative(Var::p(i));
        c[Var::p(i).slot(n)] = -h.derivative(Var::q(i));
    }
    return VectorField(std::move(c));
}

/// Symplectic pairing sum_i X^{p_i} Y^{q_i} - X^{q_i} Y^{p_i}.
/// Oriented so that pairing(d_p, d_q) = 1 and pairing(X_f, X_g) = {f,g}.
inline Poly symplectic_pairing(const VectorField& x, const VectorField& y) {
    if (x.pairs() != y.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    const std::size_t n = x.pairs();
    Poly r(n);
    for (std::size_t i = 0; i < n; ++i) {
        r += x.component(Var::p(i)) * y.component(Var::q(i));
        r -= x.component(Var::q(i)) * y.component(Var::p(i));
    }
    return r;
}

/// Action-angle frame (X_1..X_n, Y_1..Y_n).
struct AAFrame {
    std::vector<VectorField> x;
    std::vector<VectorField> y;

    std::size_t pairs() const { return x.empty() ? 0 : x.front().pairs(); }

    /// X_i = d_{p_i}, Y_i = d_{q_i}: reproduces the normal product.
    static AAFrame standard(std::size_t pairs) {
        AAFrame f;
        for (std::size_t i = 0; i < pairs; ++i) {
            f.x.push_back(VectorField::coordinate(pairs, Var::p(i)));
            f.y.push_back(VectorField::coordinate(pairs, Var::q(i)));
        }
        return f;
    }

    /// X_i = d_{q_i}, Y_i = d_{p_i}: the anti-normal ordering, opposite orientation.
    static AAFrame swapped(std::size_t pairs) {
        AAFrame f = standard(pairs);
        std::swap(f.x, f.y);
        return f;
    }
};

struct FrameCheck {
    bool valid;           // commuting, and pairings equal +delta_ij
    int orientation;      // +1 or -1 when the pairing is a signed identity, 0 otherwise
    bool commuting;       // all Lie brackets vanish
    std::string witness;  // first failure, empty when valid
    explicit operator bool() const { return valid; }
};

/// Checks pairwise Lie-commutation and omega(X_i,Y_j) = delta_ij, omega(X_i,X_j) = omega(Y_i,Y_j) = 0.
/// A frame whose pairing is -delta_ij is reported with orientation -1 and valid = false.
inline FrameCheck validate_aa_frame(const AAFrame& frame) {
    const std::size_t n = frame.x.size();
    if (n == 0 || frame.y.size() != n) throw std::invalid_argument("frame needs n X-fields and n Y-fields");
    for (const auto& v : frame.x)
        if (v.pairs() != n) throw std::invalid_argument("frame size does not match number of pairs");
    for (const auto& v : frame.y)
        if (v.pairs() != n) throw std::invalid_argument("frame size does not match number of pairs");

    std::vector<std::pair<std::string, const VectorField*>> all;
    for (std::size_t i = 0; i < n; ++i) all.emplace_back("X" + std::to_string(i + 1), &frame.x[i]);
    for (std::size_t i = 0; i < n; ++i) all.emplace_back("Y" + std::to_string(i + 1), &frame.y[i]);

    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
            if (!lie_bracket(*all[a].second, *all[b].second).is_zero())
                return {false, 0, false, "Lie bracket [" + all[a].first + "," + all[b].first + "] is nonzero"};

    int orientation = 0;
    for (std::size_t a = 0; a < all.size(); ++a) {
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            const Poly w = symplectic_pairing(*all[a].second, *all[b].second);
            const bool diagonal = a < n && b == a + n;
            auto bad = [&](const std::string& what) {
                return FrameCheck{false, 0, true,
                                  "omega(" + all[a].first + "," + all[b].first + ") = " + format(w) + ", " + what};
            };
            if (!diagonal) {
                if (!w.is_zero()) return bad("expected 0");
                continue;
            }
            if (!w.is_constant() || (w.constant_term() != 1 && w.constant_term() != -1))
                return bad("expected 1");
            const int sign = w.constant_term() > 0 ? 1 : -1;
            if (orientation == 0) orientation = sign;
            if (sign != orientation) return bad("expected " + std::to_string(orientation));
        }
    }
    if (orientation < 0)
        return {false, -1, true, "omega(X1,Y1) = -1: frame has reversed orientation"};
    return {true, 1, true, ""};
}

/// Action-angle product sum_a hbar^{|a|}/a! (X^a F)(Y^a G) over multi-indices a.
/// Requires commuting fields with pairing +-delta_ij; the reversed orientation
/// yields the product of the opposite bracket.
inline HSeries star_action_angle(const AAFrame& frame, const HSeries& F, const HSeries& G) {
    const FrameCheck check = validate_aa_frame(frame);
    if (check.orientation == 0) throw std::invalid_argument("invalid action-angle frame: " + check.witness);
    if (F.pairs() != frame.pairs()) throw std::invalid_argument("frame and series have different number of pairs");
    return detail::star_from_terms(F, G, [&](const Poly& f, const Poly& g, std::size_t max_order) {
        return detail::bidifferential_terms(
            f, g, frame.x.size(), max_order, [&](std::size_t i, const Poly& a) { return frame.x[i].apply(a); },
            [&](std::size_t i, const Poly& b) { return frame.y[i].apply(b); });
    });
}

}  // namespace qlift
