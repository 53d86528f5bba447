#include <qlift/parse.hpp>

#include <gtest/gtest.h>

#include "support/random.hpp"

#include <map>

using namespace qlift;
using qlift::testing::random_poly;
using qlift::testing::Rng;

namespace {

// Brute-force expander: multiplies out a product of sums of monomials by
// enumerating every choice of one summand per factor.
using TermList = std::vector<std::pair<Exponent, Rational>>;

std::map<Exponent, Rational> expand_product(const std::vector<TermList>& factors, std::size_t vars) {
    std::map<Exponent, Rational> out;
    std::vector<std::size_t> pick(factors.size(), 0);
    for (;;) {
        Exponent e(vars, 0);
        Rational c = 1;
        for (std::size_t f = 0; f < factors.size(); ++f) {
            const auto& [fe, fc] = factors[f][pick[f]];
            for (std::size_t k = 0; k < vars; ++k) e[k] += fe[k];
            c *= fc;
        }
        out[e] += c;
        std::size_t f = 0;
        while (f < factors.size() && ++pick[f] == factors[f].size()) pick[f++] = 0;
        if (f == factors.size()) break;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

Poly from_map(std::size_t pairs, const std::map<Exponent, Rational>& m) {
    Poly a(pairs);
    for (const auto& [e, c] : m) a += Poly::monomial(pairs, e, c);
    return a;
}

Exponent ex(std::initializer_list<unsigned> v) { return Exponent(v); }

}  // namespace

TEST(ParsePoly, LiteralTranscription) {
    auto r = parse_poly("p1*q1", 1);
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(r.diagnostics.empty());
    EXPECT_EQ(*r.value, Poly::monomial(1, ex({1, 1}), 1));
}

TEST(ParsePoly, CommutativeCancellation) {
    auto r = parse_poly("p1*q1 - q1*p1", 1);
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(r.value->is_zero());
    EXPECT_TRUE(r.value->terms().empty());
}

TEST(ParsePoly, BinomialMatchesBruteForceExpansion) {
    // (p1 + q1)^2 with slots (q1, p1)
    const TermList sum = {{ex({0, 1}), 1}, {ex({1, 0}), 1}};
    const auto expected = from_map(1, expand_product({sum, sum}, 2));
    EXPECT_EQ(poly("(p1+q1)^2", 1), expected);
    EXPECT_EQ(format(expected), "p1^2 + 2*q1*p1 + q1^2");

    const TermList cubic = {{ex({0, 1}), make_rational(1, 2)}, {ex({1, 0}), -3}, {ex({0, 0}), 2}};
    EXPECT_EQ(poly("(1/2*p1 - 3*q1 + 2)^3", 1), from_map(1, expand_product({cubic, cubic, cubic}, 2)));
}

TEST(ParsePoly, PrecedenceAndAssociativity) {
    EXPECT_EQ(poly("-q1^2", 1), -poly("q1*q1", 1));
    EXPECT_EQ(poly("q1^2^3", 1), poly("q1^8", 1));
    EXPECT_EQ(poly("2*q1 + 3*p1*q1", 1), poly("(2 + 3*p1)*q1", 1));
    EXPECT_EQ(poly("1 - 2 - 3", 1), Poly::constant(1, -4));
    EXPECT_EQ(poly("6/4", 1), Poly::constant(1, make_rational(3, 2)));
    EXPECT_EQ(poly("  q2 *p1 ", 2), poly("p1*q2", 2));
}

TEST(ParsePoly, ErrorsCarryPositions) {
    struct Case {
        const char* text;
        std::size_t pairs;
        std::size_t position;
        const char* fragment;
    };
    const Case cases[] = {
        {"x1 + q1", 1, 0, "unknown identifier"},
        {"q1 + q3", 2, 5, "index out of range"},
        {"q0", 2, 0, "index out of range"},
        {"1/0*q1", 1, 0, "malformed literal"},
        {"2 + 3/", 1, 4, "malformed literal"},
        {"(q1 + p1", 1, 0, "unbalanced parentheses"},
        {"q1 + p1)", 1, 7, "unbalanced parentheses"},
        {"q1 / p1", 1, 3, "unexpected character"},
        {"q1^p1", 1, 3, "exponent"},
        {"", 1, 0, "empty"},
        {"h*q1", 1, 0, "unknown identifier"},
    };
    for (const auto& c : cases) {
        auto r = parse_poly(c.text, c.pairs);
        ASSERT_FALSE(r.ok()) << c.text;
        ASSERT_EQ(r.diagnostics.size(), 1u) << c.text;
        EXPECT_EQ(r.diagnostics[0].position, c.position) << c.text;
        EXPECT_NE(r.diagnostics[0].message.find(c.fragment), std::string::npos)
            << c.text << ": " << r.diagnostics[0].message;
    }
}

TEST(ParsePoly, FormatRoundTripOnRandomPolys) {
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = 1 + i % 3;
        const Poly a = random_poly(rng, n, 5, 6);
        auto r = parse_poly(format(a), n);
        ASSERT_TRUE(r.ok()) << format(a);
        EXPECT_EQ(*r.value, a) << format(a);
    }
}

TEST(ParseSeries, HbarIdentifier) {
    const HSeries s = hseries("p1*q1 + h*p1 - 1/2*h^2*q1^2 + h^3", 1, 2);
    EXPECT_EQ(s.order(), 2u);
    EXPECT_EQ(s[0], poly("p1*q1", 1));
    EXPECT_EQ(s[1], poly("p1", 1));
    EXPECT_EQ(s[2], poly("-1/2*q1^2", 1));
    EXPECT_EQ(hseries(format(s), 1, 2), s);
}

TEST(PolyArith, Examples) {
    const Poly pq = poly("p1*q1", 1);
    EXPECT_EQ(pq * pq, poly("p1^2*q1^2", 1));
    const Poly p = poly("p1", 1);
    EXPECT_TRUE((p + p * Rational(-1)).is_zero());
    // (p1 + q2)(p1 - q2), slots (q1, q2, p1, p2)
    const TermList a = {{ex({0, 0, 1, 0}), 1}, {ex({0, 1, 0, 0}), 1}};
    const TermList b = {{ex({0, 0, 1, 0}), 1}, {ex({0, 1, 0, 0}), -1}};
    EXPECT_EQ(poly("p1+q2", 2) * poly("p1-q2", 2), from_map(2, expand_product({a, b}, 4)));
    EXPECT_EQ(poly("p1+q2", 2) * poly("p1-q2", 2), poly("p1^2 - q2^2", 2));
}

TEST(PolyArith, MismatchedPairsThrow) {
    EXPECT_THROW(poly("p1", 1) + poly("p1", 2), std::invalid_argument);
    EXPECT_THROW(poly("p1", 1) * poly("p1", 2), std::invalid_argument);
    EXPECT_THROW(Poly(0), std::invalid_argument);
}

TEST(PolyArith, DegreeConventions) {
    EXPECT_EQ(Poly(2).degree(), -1);
    EXPECT_EQ(poly("3", 1).degree(), 0);
    EXPECT_EQ(poly("q1*p2^2 + p1", 2).degree(), 3);
    EXPECT_TRUE(poly("q1*p1 + p1^2", 1).is_homogeneous());
    EXPECT_FALSE(poly("q1*p1 + p1", 1).is_homogeneous());
}

TEST(PolyArith, CanonicalOrderIsGradedLex) {
    // q1 < q2 < p1 < p2: within a degree the largest variable dominates.
    EXPECT_EQ(format(poly("q1 + q2 + p1 + p2 + 1 + q1*p2 + p1^2", 2)), "q1*p2 + p1^2 + p2 + p1 + q2 + q1 + 1");
}

TEST(PolyArith, RingAxiomsOnRandomTriples) {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + i % 3;
        const Poly a = random_poly(rng, n, 5);
        const Poly b = random_poly(rng, n, 5);
        const Poly c = random_poly(rng, n, 5);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
    }
}

TEST(PartialDerivative, Examples) {
    EXPECT_EQ(poly("p1*q1", 1).derivative(Var::p(0)), poly("q1", 1));
    EXPECT_TRUE(poly("p1^2", 1).derivative(Var::q(0)).is_zero());
    // power rule oracle: d/dp (p^a q^b) = a p^{a-1} q^b
    const Poly a = Poly::monomial(1, ex({2, 2}), 1);
    EXPECT_EQ(a.derivative(Var::p(0)), Poly::monomial(1, ex({2, 1}), 2));
    EXPECT_EQ(a.derivative(Var::p(0)), poly("2*p1*q1^2", 1));
    EXPECT_THROW(a.derivative(Var::q(1)), std::invalid_argument);
}

TEST(PartialDerivative, LeibnizAndMixedPartials) {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + i % 3;
        const Poly a = random_poly(rng, n, 5);
        const Poly b = random_poly(rng, n, 5);
        for (std::size_t s = 0; s < 2 * n; ++s) {
            const Var x = Var::from_slot(s, n);
            EXPECT_EQ((a * b).derivative(x), a.derivative(x) * b + a * b.derivative(x));
            for (std::size_t t = 0; t < 2 * n; ++t) {
                const Var y = Var::from_slot(t, n);
                EXPECT_EQ(a.derivative(x).derivative(y), a.derivative(y).derivative(x));
            }
        }
    }
}

TEST(Substitute, ShiftsVariables) {
    const Poly a = poly("p1 + 3*q1^2", 1);
    const std::vector<Poly> images = {poly("q1 + 2*p1", 1), poly("p1", 1)};
    EXPECT_EQ(substitute(a, images), poly("p1 + 3*(q1 + 2*p1)^2", 1));
}

TEST(HSeriesArith, Examples) {
    const HSeries s = hseries("p1 + h*q1 + h^2*p1", 1, 2);
    EXPECT_EQ(s.truncated(1), hseries("p1 + h*q1", 1, 1));

    const HSeries hp = hseries("h*p1", 1, 1);
    const HSeries hq = hseries("h*q1", 1, 1);
    EXPECT_TRUE(mul_commutative(hp, hq).is_zero());

    // (1 + h p)(1 - h p) = 1 - h^2 p^2 by convolution
    const HSeries a = hseries("1 + h*p1", 1, 2);
    const HSeries b = hseries("1 - h*p1", 1, 2);
    EXPECT_EQ(mul_commutative(a, b), hseries("1 - h^2*p1^2", 1, 2));
}

TEST(HSeriesArith, TruncationAndShift) {
    const HSeries a = hseries("p1 + h*q1", 1, 3);
    const HSeries b = hseries("q1", 1, 1);
    EXPECT_EQ((a + b).order(), 1u);
    EXPECT_EQ(a.shifted(2), hseries("h^2*p1 + h^3*q1", 1, 3));
    EXPECT_EQ(a.shifted(3), hseries("h^3*p1", 1, 3));
    EXPECT_THROW(a.shifted(-1), std::invalid_argument);
    EXPECT_THROW(a + hseries("q1", 2, 3), std::invalid_argument);
    EXPECT_THROW(b.truncated(2), std::invalid_argument);
    EXPECT_EQ(b.extended(3).truncated(1), b);
}
