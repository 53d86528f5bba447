#pragma once

// Polynomial differential forms on C^{2n} and the comparison map to C_f.
//
// Forms are stored on strictly increasing tuples of one-form slots
// (dq1..dqn, dp1..dpn in slot order). Relative forms are represented by
// absolute representatives; the quotient by df_i ^ (...) is never built.

#include <qlift/koszul.hpp>

#include <map>
#include <span>
#include <stdexcept>
#include <string>

namespace qlift {

class KForm {
public:
    using Entries = std::map<IndexTuple, Poly>;

    KForm(std::size_t pairs, std::size_t degree) : pairs_(pairs), degree_(degree) {
        if (pairs == 0) throw std::invalid_argument("form needs at least one q/p pair");
        if (degree > 2 * pairs) throw std::invalid_argument("form degree exceeds 2n");
    }

    static KForm function(const Poly& f) {
        KForm a(f.pairs(), 0);
        a.add({}, f);
        return a;
    }

    /// The one-form dv.
    static KForm differential(std::size_t pairs, Var v) {
        Poly::check_var(pairs, v);
        KForm a(pairs, 1);
        a.add({v.slot(pairs)}, Poly::constant(pairs, Rational(1)));
        return a;
    }

    std::size_t pairs() const { return pairs_; }
    std::size_t degree() const { return degree_; }
    const Entries& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    Poly at(const IndexTuple& t) const {
        auto it = entries_.find(t);
        return it == entries_.end() ? Poly(pairs_) : it->second;
    }

    KForm& add(const IndexTuple& t, const Poly& f) {
        if (t.size() != degree_) throw std::invalid_argument("slot tuple length must equal form degree");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] >= 2 * pairs_) throw std::invalid_argument("slot out of range in form tuple");
            if (i && t[i] <= t[i - 1]) throw std::invalid_argument("form tuples must be strictly increasing");
        }
        if (f.pairs() != pairs_) throw std::invalid_argument("mismatched number of variable pairs");
        if (f.is_zero()) return *this;
        auto [it, inserted] = entries_.try_emplace(t, f);
        if (!inserted) {
            it->second += f;
            if (it->second.is_zero()) entries_.erase(it);
        }
        return *this;
    }

    friend KForm operator+(KForm a, const KForm& b) {
        if (a.pairs_ != b.pairs_ || a.degree_ != b.degree_) throw std::invalid_argument("forms of different type");
        for (const auto& [t, f] : b.entries_) a.add(t, f);
        return a;
    }

    friend KForm operator*(const Poly& g, const KForm& a) {
        KForm r(a.pairs_, a.degree_);
        for (const auto& [t, f] : a.entries_) r.add(t, g * f);
        return r;
    }

    friend bool operator==(const KForm&, const KForm&) = default;

private:
    std::size_t pairs_;
    std::size_t degree_;
    Entries entries_;
};

inline std::string format(const KForm& a) {
    if (a.is_zero()) return "0";
    std::string s;
    for (const auto& [t, f] : a.entries()) {
        if (!s.empty()) s += " + ";
        s += "(" + format(f) + ")";
        for (std::size_t i = 0; i < t.size(); ++i)
            s += (i ? "^d" : "*d") + Var::from_slot(t[i], a.pairs()).name();
    }
    return s;
}

/// d(f dx_I) = sum_v d_v f dx_v ^ dx_I.
inline KForm exterior_derivative(const KForm& a) {
    if (a.degree() >= 2 * a.pairs()) throw std::invalid_argument("exterior derivative of a top-degree form");
    const std::size_t n = a.pairs();
    KForm r(n, a.degree() + 1);
    for (const auto& [t, f] : a.entries()) {
        for (std::size_t v = 0; v < 2 * n; ++v) {
            if (std::binary_search(t.begin(), t.end(), v)) continue;
            Poly d = f.derivative(Var::from_slot(v, n));
            if (d.is_zero()) continue;
            IndexTuple u;
            std::size_t before = 0;
            for (std::size_t x : t) {
                if (x < v) ++before;
            }
            u = t;
            u.insert(u.begin() + static_cast<long>(before), v);
            r.add(u, before % 2 ? -d : d);
        }
    }
    return r;
}

/// Graded-commutative wedge product.
inline KForm wedge(const KForm& a, const KForm& b) {
    if (a.pairs() != b.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    if (a.degree() + b.degree() > 2 * a.pairs()) throw std::invalid_argument("wedge degree exceeds 2n");
    KForm r(a.pairs(), a.degree() + b.degree());
    for (const auto& [s, f] : a.entries()) {
        for (const auto& [t, g] : b.entries()) {
            IndexTuple u;
            std::size_t inversions = 0;
            bool overlap = false;
            std::size_t i = 0;
            std::size_t j = 0;
            while (i < s.size() || j < t.size()) {
                if (j == t.size() || (i < s.size() && s[i] < t[j])) {
                    u.push_back(s[i++]);
                } else if (i == s.size() || t[j] < s[i]) {
                    inversions += s.size() - i;
                    u.push_back(t[j++]);
                } else {
                    overlap = true;
                    break;
                }
            }
            if (overlap) continue;
            const Poly fg = f * g;
            r.add(u, inversions % 2 ? -fg : fg);
        }
    }
    return r;
}

/// Interior product i_v(f dx_{i_1}^...^dx_{i_k}) = sum_r (-1)^r v^{i_r} f dx_{I without i_r}.
inline KForm contract_field(const VectorField& v, const KForm& a) {
    if (a.degree() == 0) throw std::invalid_argument("cannot contract a 0-form");
    if (v.pairs() != a.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    KForm r(a.pairs(), a.degree() - 1);
    for (const auto& [t, f] : a.entries()) {
        for (std::size_t k = 0; k < t.size(); ++k) {
            const Poly& c = v.components()[t[k]];
            if (c.is_zero()) continue;
            IndexTuple u = t;
            u.erase(u.begin() + static_cast<long>(k));
            const Poly term = c * f;
            r.add(u, k % 2 ? -term : term);
        }
    }
    return r;
}

/// omega = sum_i dq_i ^ dp_i; with the bracket convention here, i_{X_H} omega = dH.
inline KForm symplectic_form(std::size_t pairs) {
    KForm w(pairs, 2);
    for (std::size_t i = 0; i < pairs; ++i)
        w.add({Var::q(i).slot(pairs), Var::p(i).slot(pairs)}, Poly::constant(pairs, Rational(1)));
    return w;
}

/// Exact one-form dH.
inline KForm exact_form(const Poly& h) { return exterior_derivative(KForm::function(h)); }

/// The chain map from forms to C_f. The entry at j_1 < ... < j_k is
/// i_{v_{j_1}} i_{v_{j_2}} ... i_{v_{j_k}} a (v_{j_k} contracted first), with v_j the hamiltonian field of f_j.
/// This ordering makes phi(da) = delta(phi(a)) hold in every degree.
inline Cochain comparison_phi(const KForm& a, std::span<const Poly> fs) {
    if (fs.empty()) throw std::invalid_argument("need at least one function");
    if (a.degree() > fs.size()) throw std::invalid_argument("form degree exceeds number of functions");
    for (const auto& f : fs)
        if (f.pairs() != a.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    std::vector<VectorField> fields;
    for (const auto& f : fs) fields.push_back(hamiltonian_field(f));

    Cochain out(fs.size(), a.pairs(), a.degree());
    if (a.degree() == 0) {
        out.add({}, a.at({}));
        return out;
    }
    for (const auto& t : index_tuples(fs.size(), a.degree())) {
        KForm x = a;
        for (std::size_t r = t.size(); r-- > 0;) x = contract_field(fields[t[r]], x);
        out.add(t, x.at({}));
    }
    return out;
}

}  // namespace qlift
