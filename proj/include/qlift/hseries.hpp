#pragma once

#include <qlift/poly.hpp>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlift {

/// Truncated series sum_{k<=L} hbar^k c_k with polynomial coefficients,
/// i.e. an element of R[hbar]/hbar^{L+1}.
class HSeries {
public:
    HSeries(std::size_t pairs, std::size_t order) : coeffs_(order + 1, Poly(pairs)) {}

    /// Truncation order is coeffs.size() - 1.
    explicit HSeries(std::vector<Poly> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("series needs at least the hbar^0 coefficient");
        for (const auto& c : coeffs_)
            if (c.pairs() != coeffs_.front().pairs())
                throw std::invalid_argument("mismatched number of variable pairs");
    }

    static HSeries from_poly(const Poly& a, std::size_t order) {
        HSeries r(a.pairs(), order);
        r.coeffs_[0] = a;
        return r;
    }

    std::size_t order() const { return coeffs_.size() - 1; }
    std::size_t pairs() const { return coeffs_.front().pairs(); }
    const std::vector<Poly>& coeffs() const { return coeffs_; }
    const Poly& operator[](std::size_t k) const { return coeffs_.at(k); }
    const Poly& symbol() const { return coeffs_.front(); }

    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Poly& c) { return c.is_zero(); });
    }

    /// Lowest k with a nonzero hbar^k coefficient.
    std::optional<std::size_t> valuation() const {
        for (std::size_t k = 0; k < coeffs_.size(); ++k)
            if (!coeffs_[k].is_zero()) return k;
        return std::nullopt;
    }

    /// Copy with the hbar^k coefficient replaced.
    HSeries with_coeff(std::size_t k, Poly c) const {
        if (c.pairs() != pairs()) throw std::invalid_argument("mismatched number of variable pairs");
        HSeries r = *this;
        r.coeffs_.at(k) = std::move(c);
        return r;
    }

    /// Lowers the truncation order.
    HSeries truncated(std::size_t order) const {
        if (order > this->order()) throw std::invalid_argument("truncate cannot raise the truncation order");
        return HSeries(std::vector<Poly>(coeffs_.begin(), coeffs_.begin() + static_cast<long>(order) + 1));
    }

    /// Raises the truncation order, padding with zero coefficients.
    HSeries extended(std::size_t order) const {
        if (order < this->order()) throw std::invalid_argument("extend cannot lower the truncation order");
        HSeries r = *this;
        r.coeffs_.resize(order + 1, Poly(pairs()));
        return r;
    }

    /// Multiplication by hbar^k; terms beyond the truncation are dropped.
    HSeries shifted(int k) const {
        if (k < 0) throw std::invalid_argument("negative hbar shift");
        HSeries r(pairs(), order());
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= order(); ++i)
            r.coeffs_[i + static_cast<std::size_t>(k)] = coeffs_[i];
        return r;
    }

    HSeries scaled(const Rational& s) const {
        HSeries r = *this;
        for (auto& c : r.coeffs_) c *= s;
        return r;
    }

    friend HSeries operator+(const HSeries& a, const HSeries& b) { return combine(a, b, Rational(1)); }
    friend HSeries operator-(const HSeries& a, const HSeries& b) { return combine(a, b, Rational(-1)); }
    friend HSeries operator-(const HSeries& a) { return a.scaled(Rational(-1)); }

    /// Cauchy product of coefficient sequences with the commutative polynomial product.
    friend HSeries mul_commutative(const HSeries& a, const HSeries& b) {
        check_pairs(a, b);
        const std::size_t order = std::min(a.order(), b.order());
        HSeries r(a.pairs(), order);
        for (std::size_t i = 0; i <= order; ++i) {
            if (a.coeffs_[i].is_zero()) continue;
            for (std::size_t j = 0; i + j <= order; ++j)
                if (!b.coeffs_[j].is_zero()) r.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return r;
    }

    friend bool operator==(const HSeries& a, const HSeries& b) { return a.coeffs_ == b.coeffs_; }

private:
    static void check_pairs(const HSeries& a, const HSeries& b) {
        if (a.pairs() != b.pairs()) throw std::invalid_argument("mismatched number of variable pairs");
    }

    static HSeries combine(const HSeries& a, const HSeries& b, const Rational& sign) {
        check_pairs(a, b);
        const std::size_t order = std::min(a.order(), b.order());
        HSeries r = a.truncated(order);
        for (std::size_t k = 0; k <= order; ++k) {
            if (sign > 0)
                r.coeffs_[k] += b.coeffs_[k];
            else
                r.coeffs_[k] -= b.coeffs_[k];
        }
        return r;
    }

    std::vector<Poly> coeffs_;
};

/// Text form "c0 + h*(c1) + h^2*(c2)"; zero coefficients are skipped.
inline std::string format(const HSeries& a) {
    std::string out;
    for (std::size_t k = 0; k <= a.order(); ++k) {
        if (a[k].is_zero()) continue;
        if (!out.empty()) out += " + ";
        if (k == 0)
            out += format(a[k]);
        else
            out += (k == 1 ? std::string("h") : "h^" + std::to_string(k)) + "*(" + format(a[k]) + ")";
    }
    return out.empty() ? "0" : out;
}

inline std::ostream& operator<<(std::ostream& os, const HSeries& a) { return os << format(a); }

}  // namespace qlift
