#pragma once

// Order-by-order quantisation of an involutive system f = (f_1..f_k).
//
// An l-lifting is a tuple F_i in R[hbar]/hbar^{l+1} with symbols f_i whose
// star commutators vanish mod hbar^{l+2}. Lifting G_i of F_i one order up,
// the anomaly chi_ij is the hbar^{l+2} coefficient of [G_i, G_j]. Replacing
// G by G - hbar^{l+1} m changes chi by delta(m), so the extension succeeds
// exactly when chi is a coboundary.

#include <qlift/koszul.hpp>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qlift {

struct CommutatorFailure {
    std::size_t i;
    std::size_t j;
    std::size_t order;  // hbar power of the first nonzero commutator coefficient
    Poly coefficient;
};

struct LiftingCheck {
    bool ok;
    std::optional<CommutatorFailure> failure;
    explicit operator bool() const { return ok; }
};

namespace detail {

inline void check_tuple(std::span<const HSeries> F) {
    if (F.empty()) throw std::invalid_argument("lifting needs at least one element");
    for (const auto& x : F)
        if (x.pairs() != F.front().pairs()) throw std::invalid_argument("mismatched number of variable pairs");
}

// F truncated to `level` and zero-padded to `working`.
inline std::vector<HSeries> reshape(std::span<const HSeries> F, std::size_t level, std::size_t working) {
    std::vector<HSeries> out;
    for (const auto& x : F) out.push_back(x.truncated(level).extended(working));
    return out;
}

}  // namespace detail

/// True iff all pairwise star commutators of F (read in A_l) vanish mod hbar^{l+2}.
/// Coefficients of F above hbar^l are ignored; truncation below l is an error.
inline LiftingCheck check_lifting(std::span<const HSeries> F, std::size_t level) {
    detail::check_tuple(F);
    for (const auto& x : F)
        if (x.order() < level) throw std::invalid_argument("insufficient truncation for lifting level");
    const auto G = detail::reshape(F, level, level + 1);
    for (std::size_t i = 0; i < G.size(); ++i)
        for (std::size_t j = i + 1; j < G.size(); ++j) {
            const HSeries c = star_commutator(G[i], G[j]);
            if (auto k = c.valuation()) return {false, CommutatorFailure{i, j, *k, c[*k]}};
        }
    return {true, std::nullopt};
}

/// Raised when the input to anomaly/extension is not a lift of an l-lifting.
class InvalidLiftError : public std::invalid_argument {
public:
    InvalidLiftError(const std::string& what, CommutatorFailure failure)
        : std::invalid_argument(what), failure_(std::move(failure)) {}
    const CommutatorFailure& failure() const { return failure_; }

private:
    CommutatorFailure failure_;
};

/// Anomaly 2-cochain of G in A_{l+1} lifting an l-lifting: chi_ij = hbar^{l+2} coefficient of [G_i,G_j].
/// The result is checked to be a delta-cocycle.
inline Cochain anomaly(std::span<const HSeries> G, std::size_t level) {
    detail::check_tuple(G);
    for (const auto& x : G)
        if (x.order() < level + 1) throw std::invalid_argument("anomaly needs lifts of truncation >= level + 1");
    const std::size_t pairs = G.front().pairs();
    const auto W = detail::reshape(G, level + 1, level + 2);
    Cochain chi(G.size(), pairs, 2);
    for (std::size_t i = 0; i < W.size(); ++i)
        for (std::size_t j = i + 1; j < W.size(); ++j) {
            const HSeries c = star_commutator(W[i], W[j]);
            for (std::size_t k = 0; k <= level + 1; ++k)
                if (!c[k].is_zero())
                    throw InvalidLiftError("not a lift of a " + std::to_string(level) + "-lifting: [G" +
                                               std::to_string(i + 1) + ",G" + std::to_string(j + 1) + "] has hbar^" +
                                               std::to_string(k) + " coefficient " + format(c[k]),
                                           CommutatorFailure{i, j, k, c[k]});
            chi.add({i, j}, c[level + 2]);
        }
    std::vector<Poly> fs;
    for (const auto& x : G) fs.push_back(x.symbol());
    if (!delta(chi, fs).is_zero()) throw std::logic_error("anomaly is not a cocycle; is the system involutive?");
    return chi;
}

/// An l-lifting; the constructor enforces the invariant.
class Lifting {
public:
    Lifting(std::vector<HSeries> F, std::size_t level) : level_(level) {
        detail::check_tuple(F);
        for (auto& x : F) F_.push_back(x.order() > level ? x.truncated(level) : x.extended(level));
        if (auto check = check_lifting(F_, level); !check) {
            const auto& w = *check.failure;
            throw InvalidLiftError("not a " + std::to_string(level) + "-lifting: [F" + std::to_string(w.i + 1) + ",F" +
                                       std::to_string(w.j + 1) + "] has hbar^" + std::to_string(w.order) +
                                       " coefficient " + format(w.coefficient),
                                   w);
        }
    }

    /// The 0-lifting F = f of an involutive system.
    static Lifting from_system(std::span<const Poly> fs) {
        std::vector<HSeries> F;
        for (const auto& f : fs) F.push_back(HSeries::from_poly(f, 0));
        return Lifting(std::move(F), 0);
    }

    std::size_t level() const { return level_; }
    std::size_t size() const { return F_.size(); }
    std::size_t pairs() const { return F_.front().pairs(); }
    const std::vector<HSeries>& elements() const { return F_; }

    std::vector<Poly> base() const {
        std::vector<Poly> b;
        for (const auto& x : F_) b.push_back(x.symbol());
        return b;
    }

private:
    std::size_t level_;
    std::vector<HSeries> F_;
};

/// One order of the correction log: G - hbar^{level+1} m cancelled chi.
struct Correction {
    std::size_t level;  // level of the lifting that was extended
    Cochain chi;
    std::vector<Poly> m;
};

struct GradedSlice {
    std::size_t p;
    int internal_degree;
    std::size_t cohomology_dim;
};

struct Obstruction {
    enum class Kind { no_solution_within_bound, nonzero_graded_class };

    std::size_t level;
    Cochain chi;
    int degree_bound;
    Kind kind;
    std::optional<GradedSlice> slice;  // set for nonzero_graded_class

    std::string classification() const {
        return kind == Kind::nonzero_graded_class ? "nonzero class in graded slice" : "no solution within degree bound";
    }

    std::string suggestion() const {
        if (kind == Kind::nonzero_graded_class) return "";
        return "retry with a degree bound above " + std::to_string(degree_bound);
    }
};

/// Solves {f_i, m_j} - {f_j, m_i} = chi_ij, i.e. delta(m) = -chi.
/// Homogeneous systems whose anomaly sits in one graded slice are searched on the whole slice,
/// which makes a failure a genuine nonzero class; otherwise the search stops at degree_bound.
inline std::variant<std::vector<Poly>, Obstruction> classify_anomaly(const Cochain& chi, std::span<const Poly> fs,
                                                                   std::size_t level, int degree_bound) {
    const Cochain target = -chi;
    if (auto m = solve_coboundary(target, fs, degree_bound)) return m->as_vector();

    const bool homogeneous = std::all_of(fs.begin(), fs.end(), [](const Poly& f) {
        return !f.is_zero() && f.is_homogeneous();
    });
    if (homogeneous) {
        if (auto d = graded_slice_of(target, fs)) {
            if (auto m = solve_coboundary_in_slice(target, fs, *d)) return m->as_vector();
            return Obstruction{level, chi, degree_bound, Obstruction::Kind::nonzero_graded_class,
                               GradedSlice{2, *d, graded_cohomology_dim(fs, 2, *d)}};
        }
    }
    return Obstruction{level, chi, degree_bound, Obstruction::Kind::no_solution_within_bound, std::nullopt};
}

struct Extension {
    Lifting lifting;
    std::optional<Correction> correction;  // empty when the anomaly vanished
};

/// Corrects a lift G (truncation l+1) of an l-lifting to an (l+1)-lifting, or reports the obstruction.
/// The default bound is deg(chi) + 2.
inline std::variant<Extension, Obstruction> correct_lift(std::vector<HSeries> G, std::size_t l,
                                                         std::optional<int> degree_bound = std::nullopt) {
    const Cochain chi = anomaly(G, l);
    for (auto& x : G) x = x.truncated(l + 1);
    if (chi.is_zero()) return Extension{Lifting(std::move(G), l + 1), std::nullopt};

    std::vector<Poly> fs;
    for (const auto& x : G) fs.push_back(x.symbol());
    const int bound = degree_bound.value_or(std::max(chi.max_degree(), 0) + 2);
    auto solved = classify_anomaly(chi, fs, l, bound);
    if (auto* obstruction = std::get_if<Obstruction>(&solved)) return std::move(*obstruction);

    auto& m = std::get<std::vector<Poly>>(solved);
    for (std::size_t i = 0; i < G.size(); ++i) G[i] = G[i] - HSeries::from_poly(m[i], l + 1).shifted(static_cast<int>(l + 1));
    if (!check_lifting(G, l + 1)) throw std::logic_error("correct_lift: corrected tuple does not commute");
    return Extension{Lifting(std::move(G), l + 1), Correction{l, chi, std::move(m)}};
}

/// Extends an l-lifting to an (l+1)-lifting, starting from the lift with zero hbar^{l+1} terms.
inline std::variant<Extension, Obstruction> extend_lifting(const Lifting& F,
                                                           std::optional<int> degree_bound = std::nullopt) {
    std::vector<HSeries> G;
    for (const auto& x : F.elements()) G.push_back(x.extended(F.level() + 1));
    return correct_lift(std::move(G), F.level(), degree_bound);
}

/// Degree bound per order: explicit per-level value, else a uniform override, else deg(chi) + 2.
struct DegreePolicy {
    std::optional<int> uniform;
    std::map<std::size_t, int> per_level;

    std::optional<int> bound_for(std::size_t level) const {
        if (auto it = per_level.find(level); it != per_level.end()) return it->second;
        return uniform;
    }
};

struct Certificate {
    std::vector<Poly> system;
    std::size_t order;
    std::vector<HSeries> F;
    std::size_t residual_order;  // commutators verified to vanish through this hbar power
    bool residuals_vanish;
    std::vector<Correction> corrections;
};

struct NotInvolutive {
    BracketWitness witness;
};

using QuantizeResult = std::variant<Certificate, Obstruction, NotInvolutive>;

/// Iterates extend_lifting from the 0-lifting F = f up to level `order`.
inline QuantizeResult quantize(std::span<const Poly> fs, std::size_t order, const DegreePolicy& policy = {}) {
    if (auto inv = is_involutive(fs); !inv) return NotInvolutive{*inv.witness};
    Lifting F = Lifting::from_system(fs);
    std::vector<Correction> log;
    while (F.level() < order) {
        auto step = extend_lifting(F, policy.bound_for(F.level()));
        if (auto* obstruction = std::get_if<Obstruction>(&step)) return std::move(*obstruction);
        auto& ext = std::get<Extension>(step);
        if (ext.correction) log.push_back(std::move(*ext.correction));
        F = std::move(ext.lifting);
    }
    const LiftingCheck residual = check_lifting(F.elements(), order);
    if (!residual) throw std::logic_error("quantize: final lifting fails the residual check");
    return Certificate{std::vector<Poly>(fs.begin(), fs.end()), order, F.elements(), order + 1, true, std::move(log)};
}

struct CertificateCheck {
    bool ok;
    std::string reason;                       // empty when ok
    std::optional<CommutatorFailure> failure;  // set for commutator failures
    explicit operator bool() const { return ok; }
};

/// Independent re-check of a certificate: symbols, commutators, and a replay of the correction log.
inline CertificateCheck verify_certificate(const Certificate& c) {
    auto fail = [](std::string why) { return CertificateCheck{false, std::move(why), std::nullopt}; };
    if (c.system.empty() || c.F.size() != c.system.size()) return fail("malformed: size mismatch");
    const std::size_t pairs = c.system.front().pairs();
    for (const auto& f : c.system)
        if (f.pairs() != pairs) return fail("malformed: mismatched number of variable pairs");
    for (const auto& x : c.F)
        if (x.pairs() != pairs || x.order() != c.order) return fail("malformed: series truncation differs from order");
    for (std::size_t i = 0; i < c.F.size(); ++i)
        if (c.F[i].symbol() != c.system[i]) return fail("symbol mismatch at F" + std::to_string(i + 1));

    if (auto check = check_lifting(c.F, c.order); !check) {
        const auto& w = *check.failure;
        return CertificateCheck{false,
                                "commutator [F" + std::to_string(w.i + 1) + ",F" + std::to_string(w.j + 1) +
                                    "] nonzero at hbar^" + std::to_string(w.order),
                                w};
    }

    // Replay: every level's anomaly must be zero or match the logged correction.
    std::vector<HSeries> G;
    for (const auto& f : c.system) G.push_back(HSeries::from_poly(f, 0));
    std::size_t next = 0;
    for (std::size_t l = 0; l < c.order; ++l) {
        for (auto& x : G) x = x.extended(l + 1);
        Cochain chi(c.system.size(), pairs, 2);
        try {
            chi = anomaly(G, l);
        } catch (const std::exception& e) {
            return fail("correction log replay failed at level " + std::to_string(l) + ": " + e.what());
        }
        const bool logged = next < c.corrections.size() && c.corrections[next].level == l;
        if (!logged) {
            if (!chi.is_zero()) return fail("correction log missing level " + std::to_string(l));
            continue;
        }
        const Correction& corr = c.corrections[next++];
        if (corr.chi != chi) return fail("logged anomaly differs at level " + std::to_string(l));
        if (corr.m.size() != G.size()) return fail("malformed correction at level " + std::to_string(l));
        for (const auto& x : corr.m)
            if (x.pairs() != pairs) return fail("malformed correction at level " + std::to_string(l));
        if (delta(Cochain::from_vector(corr.m), c.system) != -chi)
            return fail("logged correction does not solve the anomaly equation at level " + std::to_string(l));
        for (std::size_t i = 0; i < G.size(); ++i)
            G[i] = G[i] - HSeries::from_poly(corr.m[i], l + 1).shifted(static_cast<int>(l + 1));
    }
    if (next != c.corrections.size()) return fail("correction log has entries beyond the replay");
    if (G != c.F) return fail("series differ from the replayed correction log");
    return {true, "", std::nullopt};
}

}  // namespace qlift
