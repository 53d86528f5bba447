#pragma once

#include <qlift/rational.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qlift {

/// Row-major sparse matrix with exact rational entries.
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::map<std::size_t, Rational>> entries;  // one map per row

    SparseMatrix() = default;
    SparseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r) {}

    void add(std::size_t r, std::size_t c, const Rational& v) {
        if (r >= rows || c >= cols) throw std::out_of_range("sparse matrix index");
        if (v == 0) return;
        auto [it, inserted] = entries[r].try_emplace(c, v);
        if (!inserted) {
            it->second += v;
            if (it->second == 0) entries[r].erase(it);
        }
    }
};

/// Incremental row echelon form over the integers (fraction-free).
///
/// Rows are cleared of denominators on insertion and reduced against the
/// existing pivot rows by integer cross-multiplication; every stored row is
/// kept primitive with a positive leading entry. Pivots therefore sit on the
/// first independent columns in column order, independent of row order.
class EchelonForm {
public:
    using Row = std::vector<std::pair<std::size_t, Integer>>;  // sorted by column

    explicit EchelonForm(std::size_t cols) : cols_(cols) {}

    /// Reduces the row and keeps it if independent. Returns its leading column, or nullopt if it reduced to zero.
    std::optional<std::size_t> insert(const std::map<std::size_t, Rational>& row) {
        Row r = clear_denominators(row);
        while (!r.empty()) {
            auto it = pivots_.find(r.front().first);
            if (it == pivots_.end()) break;
            r = eliminate(r, it->second);
        }
        if (r.empty()) return std::nullopt;
        const std::size_t lead = r.front().first;
        pivots_.emplace(lead, std::move(r));
        return lead;
    }

    std::size_t rank() const { return pivots_.size(); }
    std::size_t cols() const { return cols_; }
    const std::map<std::size_t, Row>& pivots() const { return pivots_; }

private:
    static void make_primitive(Row& r) {
        if (r.empty()) return;
        Integer g = 0;
        for (const auto& [c, v] : r) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
            if (g == 1) break;
        }
        if (r.front().second < 0) g = -g;
        if (g != 1)
            for (auto& [c, v] : r) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
    }

    Row clear_denominators(const std::map<std::size_t, Rational>& row) const {
        Integer l = 1;
        for (const auto& [c, v] : row) {
            if (c >= cols_) throw std::out_of_range("row column out of range");
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
        }
        Row r;
        r.reserve(row.size());
        for (const auto& [c, v] : row) {
            if (v == 0) continue;
            Integer x = l / v.get_den();
            x *= v.get_num();
            r.emplace_back(c, std::move(x));
        }
        make_primitive(r);
        return r;
    }

    // r <- (P_lead/g) r - (r_lead/g) P, which cancels the shared leading column.
    static Row eliminate(const Row& r, const Row& pivot) {
        Integer g;
        mpz_gcd(g.get_mpz_t(), r.front().second.get_mpz_t(), pivot.front().second.get_mpz_t());
        const Integer a = pivot.front().second / g;
        const Integer b = r.front().second / g;
        Row out;
        out.reserve(r.size() + pivot.size());
        std::size_t i = 1;
        std::size_t j = 1;
        while (i < r.size() || j < pivot.size()) {
            if (j == pivot.size() || (i < r.size() && r[i].first < pivot[j].first)) {
                out.emplace_back(r[i].first, a * r[i].second);
                ++i;
            } else if (i == r.size() || pivot[j].first < r[i].first) {
                out.emplace_back(pivot[j].first, -(b * pivot[j].second));
                ++j;
            } else {
                Integer v = a * r[i].second - b * pivot[j].second;
                if (v != 0) out.emplace_back(r[i].first, std::move(v));
                ++i;
                ++j;
            }
        }
        make_primitive(out);
        return out;
    }

    std::size_t cols_;
    std::map<std::size_t, Row> pivots_;
};

inline std::size_t rank(const SparseMatrix& a) {
    EchelonForm e(a.cols);
    for (const auto& row : a.entries) e.insert(row);
    return e.rank();
}

/// Solves A x = b exactly. Pivots are the first independent columns; free
/// variables are set to zero, so the returned solution is canonical.
inline std::optional<std::vector<Rational>> solve(const SparseMatrix& a, const std::vector<Rational>& b) {
    if (b.size() != a.rows) throw std::invalid_argument("right-hand side length does not match matrix rows");
    const std::size_t rhs = a.cols;
    EchelonForm e(a.cols + 1);
    for (std::size_t r = 0; r < a.rows; ++r) {
        std::map<std::size_t, Rational> row = a.entries[r];
        if (b[r] != 0) row.emplace(rhs, b[r]);
        if (auto lead = e.insert(row); lead && *lead == rhs) return std::nullopt;
    }
    std::vector<Rational> x(a.cols, Rational(0));
    const auto& pivots = e.pivots();
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        const auto& row = it->second;
        Rational acc = 0;
        for (std::size_t k = 1; k < row.size(); ++k) {
            const auto& [c, v] = row[k];
            if (c == rhs)
                acc += Rational(v);
            else
                acc -= Rational(v) * x[c];
        }
        x[it->first] = acc / Rational(row.front().second);
    }
    return x;
}

}  // namespace qlift
