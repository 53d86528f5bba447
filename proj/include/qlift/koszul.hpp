#pragma once

// The complex C_f: p-cochains are elements of the p-th exterior power of
// B^k (B the polynomial ring, k = number of generators f_1..f_k), with
//
//     delta(m e_I) = sum_j {f_j, m} e_I ^ e_j.
//
// Entries live on strictly increasing index tuples; e_I ^ e_j is reordered
// with the parity sign. On 1-cochains this gives
//
//     (delta m)_{ij} = {f_j, m_i} - {f_i, m_j}        (i < j).

#include <qlift/linalg.hpp>
#include <qlift/weyl.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlift {

using IndexTuple = std::vector<std::size_t>;

/// All strictly increasing p-tuples from {0..k-1}, lexicographic.
inline std::vector<IndexTuple> index_tuples(std::size_t k, std::size_t p) {
    std::vector<IndexTuple> out;
    if (p > k) return out;
    IndexTuple t(p);
    auto rec = [&](auto&& self, std::size_t pos, std::size_t start) -> void {
        if (pos == p) {
            out.push_back(t);
            return;
        }
        for (std::size_t i = start; i + (p - pos) <= k; ++i) {
            t[pos] = i;
            self(self, pos + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
    return out;
}

inline std::string format_tuple(const IndexTuple& t) {
    if (t.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "^e" : "e") + std::to_string(t[i] + 1);
    return s;
}

/// Element of C_f^p.
class Cochain {
public:
    using Entries = std::map<IndexTuple, Poly>;

    Cochain(std::size_t generators, std::size_t pairs, std::size_t degree)
        : generators_(generators), pairs_(pairs), degree_(degree) {
        if (pairs == 0) throw std::invalid_argument("cochain needs at least one q/p pair");
    }

    /// Degree-1 cochain (m_1, ..., m_k).
    static Cochain from_vector(std::span<const Poly> m) {
        if (m.empty()) throw std::invalid_argument("empty vector");
        Cochain c(m.size(), m.front().pairs(), 1);
        for (std::size_t i = 0; i < m.size(); ++i) c.add({i}, m[i]);
        return c;
    }

    static Cochain scalar(std::size_t generators, const Poly& m) {
        Cochain c(generators, m.pairs(), 0);
        c.add({}, m);
        return c;
    }

    std::size_t generators() const { return generators_; }
    std::size_t pairs() const { return pairs_; }
    std::size_t degree() const { return degree_; }
    const Entries& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    Poly at(const IndexTuple& t) const {
        auto it = entries_.find(t);
        return it == entries_.end() ? Poly(pairs_) : it->second;
    }

    /// Components of a degree-1 cochain as a k-vector.
    std::vector<Poly> as_vector() const {
        if (degree_ != 1) throw std::logic_error("as_vector needs a 1-cochain");
        std::vector<Poly> v;
        for (std::size_t i = 0; i < generators_; ++i) v.push_back(at({i}));
        return v;
    }

    /// Adds m to the entry at tuple t (strictly increasing, size = degree).
    Cochain& add(const IndexTuple& t, const Poly& m) {
        check_tuple(t);
        if (m.pairs() != pairs_) throw std::invalid_argument("mismatched number of variable pairs");
        if (m.is_zero()) return *this;
        auto [it, inserted] = entries_.try_emplace(t, m);
        if (!inserted) {
            it->second += m;
            if (it->second.is_zero()) entries_.erase(it);
        }
        return *this;
    }

    /// Largest total degree over all entries, -1 for the zero cochain.
    int max_degree() const {
        int d = -1;
        for (const auto& [t, m] : entries_) d = std::max(d, m.degree());
        return d;
    }

    Cochain scaled(const Rational& s) const {
        Cochain r = *this;
        if (s == 0) r.entries_.clear();
        for (auto& [t, m] : r.entries_) m *= s;
        return r;
    }

    friend Cochain operator+(Cochain a, const Cochain& b) {
        a.check_same(b);
        for (const auto& [t, m] : b.entries_) a.add(t, m);
        return a;
    }
    friend Cochain operator-(const Cochain& a, const Cochain& b) { return a + b.scaled(Rational(-1)); }
    friend Cochain operator-(const Cochain& a) { return a.scaled(Rational(-1)); }

    friend bool operator==(const Cochain&, const Cochain&) = default;

private:
    void check_tuple(const IndexTuple& t) const {
        if (t.size() != degree_) throw std::invalid_argument("index tuple length must equal cochain degree");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] >= generators_) throw std::invalid_argument("index out of range in cochain tuple");
            if (i && t[i] <= t[i - 1]) throw std::invalid_argument("cochain tuples must be strictly increasing");
        }
    }

    void check_same(const Cochain& o) const {
        if (o.generators_ != generators_ || o.pairs_ != pairs_ || o.degree_ != degree_)
            throw std::invalid_argument("cochains live in different spaces");
    }

    std::size_t generators_;
    std::size_t pairs_;
    std::size_t degree_;
    Entries entries_;
};

inline std::string format(const Cochain& c) {
    if (c.is_zero()) return "0";
    std::string s;
    for (const auto& [t, m] : c.entries()) {
        if (!s.empty()) s += " + ";
        s += "(" + format(m) + ")*" + format_tuple(t);
    }
    return s;
}

inline std::ostream& operator<<(std::ostream& os, const Cochain& c) { return os << format(c); }

namespace detail {

inline void check_system(const Cochain& c, std::span<const Poly> fs) {
    if (fs.size() != c.generators()) throw std::invalid_argument("cochain rank does not match number of functions");
    for (const auto& f : fs)
        if (f.pairs() != c.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
}

// Inserts j into the sorted tuple t; returns the merged tuple and the sign of e_t ^ e_j.
inline std::pair<IndexTuple, int> wedge_index(const IndexTuple& t, std::size_t j) {
    IndexTuple out;
    out.reserve(t.size() + 1);
    int after = 0;
    bool placed = false;
    for (std::size_t x : t) {
        if (!placed && x > j) {
            out.push_back(j);
            placed = true;
        }
        if (x > j) ++after;
        out.push_back(x);
    }
    if (!placed) out.push_back(j);
    return {std::move(out), after % 2 ? -1 : 1};
}

}  // namespace detail

/// The differential. For degree >= k the result is the (empty) zero cochain.
inline Cochain delta(const Cochain& c, std::span<const Poly> fs) {
    detail::check_system(c, fs);
    Cochain out(c.generators(), c.pairs(), c.degree() + 1);
    for (const auto& [t, m] : c.entries()) {
        for (std::size_t j = 0; j < fs.size(); ++j) {
            if (std::binary_search(t.begin(), t.end(), j)) continue;
            Poly b = poisson_bracket(fs[j], m);
            if (b.is_zero()) continue;
            auto [u, sign] = detail::wedge_index(t, j);
            out.add(u, sign > 0 ? b : -b);
        }
    }
    return out;
}

/// t_i acting on cochains: entrywise multiplication by f_i.
inline Cochain module_action(std::size_t i, const Cochain& c, std::span<const Poly> fs) {
    detail::check_system(c, fs);
    if (i >= fs.size()) throw std::invalid_argument("module action index out of range");
    Cochain out(c.generators(), c.pairs(), c.degree());
    for (const auto& [t, m] : c.entries()) out.add(t, fs[i] * m);
    return out;
}

/// Raised when a coboundary problem is posed for a non-cocycle.
class NotCocycleError : public std::invalid_argument {
public:
    explicit NotCocycleError(Cochain delta_chi)
        : std::invalid_argument("not a cocycle: delta(chi) = " + format(delta_chi)), delta_chi_(std::move(delta_chi)) {}
    const Cochain& delta_chi() const { return delta_chi_; }

private:
    Cochain delta_chi_;
};

/// One unknown or equation of a graded linear system: a monomial placed at an index tuple.
struct BasisElement {
    IndexTuple tuple;
    Exponent exponent;

    friend bool operator<(const BasisElement& a, const BasisElement& b) {
        if (a.exponent != b.exponent) return GrlexLess{}(a.exponent, b.exponent);
        return a.tuple < b.tuple;
    }
    friend bool operator==(const BasisElement&, const BasisElement&) = default;
};

/// delta restricted to a finite monomial basis, as an exact matrix with optional right-hand side.
struct GradedSystem {
    std::vector<BasisElement> unknowns;   // columns
    std::vector<BasisElement> equations;  // rows, sorted
    SparseMatrix matrix;
    std::vector<Rational> rhs;
};

/// Assembles the matrix of delta on the span of `unknowns` (cochains of degree p).
/// Rows are every basis element hit by the image or by `target`.
inline GradedSystem assemble_delta_system(std::span<const Poly> fs, std::size_t pairs, std::size_t p,
                                          std::vector<BasisElement> unknowns, const Cochain* target = nullptr) {
    std::sort(unknowns.begin(), unknowns.end());
    std::map<BasisElement, std::size_t> rows;
    std::vector<std::vector<std::pair<BasisElement, Rational>>> columns(unknowns.size());
    for (std::size_t col = 0; col < unknowns.size(); ++col) {
        const auto& u = unknowns[col];
        Cochain basis(fs.size(), pairs, p);
        basis.add(u.tuple, Poly::monomial(pairs, u.exponent, Rational(1)));
        const Cochain image = delta(basis, fs);
        for (const auto& [t, m] : image.entries())
            for (const auto& [e, c] : m.terms()) {
                BasisElement key{t, e};
                rows.emplace(key, 0);
                columns[col].emplace_back(std::move(key), c);
            }
    }
    if (target)
        for (const auto& [t, m] : target->entries())
            for (const auto& [e, c] : m.terms()) rows.emplace(BasisElement{t, e}, 0);

    GradedSystem sys;
    sys.equations.reserve(rows.size());
    for (auto& [key, index] : rows) {
        index = sys.equations.size();
        sys.equations.push_back(key);
    }
    sys.matrix = SparseMatrix(rows.size(), unknowns.size());
    for (std::size_t col = 0; col < columns.size(); ++col)
        for (const auto& [key, c] : columns[col]) sys.matrix.add(rows.at(key), col, c);
    sys.rhs.assign(rows.size(), Rational(0));
    if (target)
        for (const auto& [t, m] : target->entries())
            for (const auto& [e, c] : m.terms()) sys.rhs[rows.at(BasisElement{t, e})] += c;
    sys.unknowns = std::move(unknowns);
    return sys;
}

/// Every monomial of degree <= max_degree on every p-tuple.
inline std::vector<BasisElement> bounded_basis(std::size_t generators, std::size_t pairs, std::size_t p,
                                               int max_degree) {
    std::vector<BasisElement> out;
    const auto tuples = index_tuples(generators, p);
    for (int d = 0; d <= max_degree; ++d)
        for (const auto& e : monomials_of_degree(2 * pairs, static_cast<unsigned>(d)))
            for (const auto& t : tuples) out.push_back({t, e});
    return out;
}

/// Weights deg(f_j) - 2: delta against f_j shifts polynomial degree by this amount.
inline std::vector<int> degree_shifts(std::span<const Poly> fs) {
    std::vector<int> w;
    for (const auto& f : fs) {
        if (f.is_zero() || !f.is_homogeneous()) throw std::invalid_argument("graded slices need nonzero homogeneous functions");
        w.push_back(f.degree() - 2);
    }
    return w;
}

/// Polynomial degree carried by tuple J in the slice of internal degree d.
inline int slice_entry_degree(std::span<const int> shifts, const IndexTuple& tuple, int d) {
    int e = d;
    for (std::size_t j : tuple) e += shifts[j];
    return e;
}

/// Basis of the graded slice (p, d): at tuple J, all monomials of degree d + sum_{j in J} (deg f_j - 2).
inline std::vector<BasisElement> slice_basis(std::span<const Poly> fs, std::size_t p, int d) {
    const auto shifts = degree_shifts(fs);
    const std::size_t pairs = fs.front().pairs();
    std::vector<BasisElement> out;
    for (const auto& t : index_tuples(fs.size(), p)) {
        const int e = slice_entry_degree(shifts, t, d);
        if (e < 0) continue;
        for (auto& x : monomials_of_degree(2 * pairs, static_cast<unsigned>(e))) out.push_back({t, std::move(x)});
    }
    return out;
}

/// The internal degree d if c lies in a single graded slice, else nullopt (also for c = 0).
inline std::optional<int> graded_slice_of(const Cochain& c, std::span<const Poly> fs) {
    const auto shifts = degree_shifts(fs);
    std::optional<int> d;
    for (const auto& [t, m] : c.entries()) {
        for (const auto& [e, coeff] : m.terms()) {
            const int here = static_cast<int>(total_degree(e)) - slice_entry_degree(shifts, t, 0);
            if (d && *d != here) return std::nullopt;
            d = here;
        }
    }
    return d;
}

/// deg(chi) + max(0, 2 - min_j deg f_j) + 2.
inline int default_degree_bound(const Cochain& chi, std::span<const Poly> fs) {
    int min_deg = 2;
    for (const auto& f : fs) min_deg = std::min(min_deg, f.degree());
    return std::max(chi.max_degree(), 0) + std::max(0, 2 - min_deg) + 2;
}

namespace detail {

inline std::optional<Cochain> solve_on_basis(const Cochain& chi, std::span<const Poly> fs,
                                             std::vector<BasisElement> basis) {
    const std::size_t p = chi.degree() - 1;
    Cochain m(chi.generators(), chi.pairs(), p);
    if (chi.is_zero()) return m;
    GradedSystem sys = assemble_delta_system(fs, chi.pairs(), p, std::move(basis), &chi);
    auto x = solve(sys.matrix, sys.rhs);
    if (!x) return std::nullopt;
    for (std::size_t col = 0; col < x->size(); ++col)
        if ((*x)[col] != 0)
            m.add(sys.unknowns[col].tuple, Poly::monomial(chi.pairs(), sys.unknowns[col].exponent, (*x)[col]));
    if (delta(m, fs) != chi) throw std::logic_error("solve_coboundary: solution failed re-verification");
    return m;
}

inline void require_cocycle(const Cochain& chi, std::span<const Poly> fs) {
    check_system(chi, fs);
    if (chi.degree() == 0) throw std::invalid_argument("coboundary problems need degree >= 1");
    Cochain dchi = delta(chi, fs);
    if (!dchi.is_zero()) throw NotCocycleError(std::move(dchi));
}

}  // namespace detail

/// Finds m with delta(m) = chi and entries of degree <= degree_bound, or nullopt if none exists within
/// the bound. The solution is canonical: pivots on the lowest monomials, free coordinates set to zero.
inline std::optional<Cochain> solve_coboundary(const Cochain& chi, std::span<const Poly> fs,
                                               std::optional<int> degree_bound = std::nullopt) {
    detail::require_cocycle(chi, fs);
    const int bound = degree_bound.value_or(default_degree_bound(chi, fs));
    if (bound < 0) throw std::invalid_argument("degree bound must be nonnegative");
    return detail::solve_on_basis(chi, fs, bounded_basis(chi.generators(), chi.pairs(), chi.degree() - 1, bound));
}

/// Same, searching the whole graded slice of internal degree d; complete for homogeneous systems.
inline std::optional<Cochain> solve_coboundary_in_slice(const Cochain& chi, std::span<const Poly> fs, int d) {
    detail::require_cocycle(chi, fs);
    return detail::solve_on_basis(chi, fs, slice_basis(fs, chi.degree() - 1, d));
}

struct SliceDimensions {
    std::size_t slice;        // dimension of the (p,d) slice of C^p
    std::size_t cocycles;     // dim ker delta^p on it
    std::size_t coboundaries; // rank of delta^{p-1} from the (p-1,d) slice
    std::size_t cohomology() const { return cocycles - coboundaries; }
};

/// Graded pieces of H^p(f) for homogeneous f.
inline SliceDimensions graded_cohomology(std::span<const Poly> fs, std::size_t p, int d) {
    if (fs.empty()) throw std::invalid_argument("need at least one function");
    const std::size_t pairs = fs.front().pairs();
    SliceDimensions out{0, 0, 0};
    auto here = slice_basis(fs, p, d);
    out.slice = here.size();
    const std::size_t rank_here = here.empty() ? 0 : rank(assemble_delta_system(fs, pairs, p, std::move(here)).matrix);
    out.cocycles = out.slice - rank_here;
    if (p > 0) {
        auto below = slice_basis(fs, p - 1, d);
        if (!below.empty()) out.coboundaries = rank(assemble_delta_system(fs, pairs, p - 1, std::move(below)).matrix);
    }
    return out;
}

inline std::size_t graded_cohomology_dim(std::span<const Poly> fs, std::size_t p, int d) {
    return graded_cohomology(fs, p, d).cohomology();
}

}  // namespace qlift
