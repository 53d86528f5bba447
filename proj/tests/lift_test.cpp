#include <qlift/lift.hpp>
#include <qlift/parse.hpp>
#include <qlift/shear.hpp>

#include <gtest/gtest.h>

#include "support/random.hpp"

using namespace qlift;
using qlift::testing::random_poly;
using qlift::testing::Rng;

namespace {

std::vector<Poly> sys(std::initializer_list<const char*> texts, std::size_t pairs) {
    std::vector<Poly> out;
    for (const char* t : texts) out.push_back(poly(t, pairs));
    return out;
}

std::vector<HSeries> series(std::initializer_list<const char*> texts, std::size_t pairs, std::size_t order) {
    std::vector<HSeries> out;
    for (const char* t : texts) out.push_back(hseries(t, pairs, order));
    return out;
}

std::vector<HSeries> lift_of(const std::vector<Poly>& fs, std::size_t order) {
    std::vector<HSeries> out;
    for (const auto& f : fs) out.push_back(HSeries::from_poly(f, order));
    return out;
}

Certificate certificate(QuantizeResult r) {
    if (!std::holds_alternative<Certificate>(r)) throw std::runtime_error("expected a certificate");
    return std::get<Certificate>(std::move(r));
}

// A valid l-lifting for a corpus system, plus G = F + hbar^{l+1} g for random g.
std::vector<HSeries> perturbed_lift(const std::vector<HSeries>& F, std::size_t l, Rng& rng) {
    std::vector<HSeries> G;
    for (const auto& x : F) {
        const Poly g = random_poly(rng, x.pairs(), 3, 3);
        G.push_back(x.truncated(l).extended(l + 1).with_coeff(l + 1, g));
    }
    return G;
}

}  // namespace

TEST(CheckLifting, Examples) {
    const auto F = series({"p1*q1", "p2*q2"}, 2, 4);
    for (std::size_t l = 0; l <= 4; ++l) EXPECT_TRUE(check_lifting(F, l)) << l;

    const auto pq = series({"p1", "q1"}, 1, 1);
    auto bad = check_lifting(pq, 0);
    ASSERT_FALSE(bad);
    EXPECT_EQ(bad.failure->i, 0u);
    EXPECT_EQ(bad.failure->j, 1u);
    EXPECT_EQ(bad.failure->order, 1u);
    EXPECT_EQ(bad.failure->coefficient, poly("1", 1));

    const auto G = series({"p1*q1", "p2*q2 + h*p1"}, 2, 1);
    EXPECT_TRUE(check_lifting(G, 0));
    auto at1 = check_lifting(G, 1);
    ASSERT_FALSE(at1);
    EXPECT_EQ(at1.failure->order, 2u);
    EXPECT_EQ(at1.failure->coefficient, poly("-p1", 2));
}

TEST(CheckLifting, TruncationAndShape) {
    EXPECT_THROW(check_lifting(series({"p1*q1", "p2*q2"}, 2, 0), 1), std::invalid_argument);
    EXPECT_THROW(check_lifting(std::vector<HSeries>{}, 0), std::invalid_argument);
    std::vector<HSeries> mixed = {hseries("p1", 1, 1), hseries("p1", 2, 1)};
    EXPECT_THROW(check_lifting(mixed, 0), std::invalid_argument);
}

TEST(Anomaly, Examples) {
    EXPECT_TRUE(anomaly(series({"p1*q1", "p2*q2"}, 2, 1), 0).is_zero());

    const Cochain chi = anomaly(series({"p1*q1", "p2*q2 + h*p1"}, 2, 1), 0);
    Cochain expected(2, 2, 2);
    expected.add({0, 1}, poly("-p1", 2));
    EXPECT_EQ(chi, expected);

    const Cochain single = anomaly(series({"p1*q1 + h*q1^2"}, 1, 3), 2);
    EXPECT_EQ(single.degree(), 2u);
    EXPECT_TRUE(single.is_zero());
}

TEST(Anomaly, RejectsInvalidLift) {
    try {
        anomaly(series({"p1", "q1"}, 1, 1), 0);
        FAIL() << "expected InvalidLiftError";
    } catch (const InvalidLiftError& e) {
        EXPECT_EQ(e.failure().order, 1u);
    }
    EXPECT_THROW(anomaly(series({"p1*q1", "p2*q2"}, 2, 0), 0), std::invalid_argument);
}

TEST(ExtendLifting, Examples) {
    const Lifting F = Lifting::from_system(sys({"p1*q1", "p2*q2"}, 2));
    auto step = extend_lifting(F);
    ASSERT_TRUE(std::holds_alternative<Extension>(step));
    const auto& ext = std::get<Extension>(step);
    EXPECT_EQ(ext.lifting.level(), 1u);
    EXPECT_FALSE(ext.correction);
    EXPECT_EQ(ext.lifting.elements(), lift_of(sys({"p1*q1", "p2*q2"}, 2), 1));

    for (std::size_t l = 0; l < 4; ++l) {
        const Lifting one(series({"p1*q1 + h*q1"}, 1, l), l);
        auto s = extend_lifting(one);
        ASSERT_TRUE(std::holds_alternative<Extension>(s));
        EXPECT_FALSE(std::get<Extension>(s).correction);
    }
}

TEST(ExtendLifting, CorrectsPerturbedLift) {
    // G = (p1q1, p2q2 + hbar p1) lifts the 0-lifting f; its anomaly is cancelled by m = (0, p1).
    const auto G = series({"p1*q1", "p2*q2 + h*p1"}, 2, 1);
    const Cochain chi = anomaly(G, 0);
    auto solved = classify_anomaly(chi, sys({"p1*q1", "p2*q2"}, 2), 0, 3);
    ASSERT_TRUE(std::holds_alternative<std::vector<Poly>>(solved));
    const auto& m = std::get<std::vector<Poly>>(solved);
    EXPECT_EQ(m, sys({"0", "p1"}, 2));

    std::vector<HSeries> corrected;
    for (std::size_t i = 0; i < G.size(); ++i) corrected.push_back(G[i] - HSeries::from_poly(m[i], 1).shifted(1));
    EXPECT_EQ(corrected, series({"p1*q1", "p2*q2"}, 2, 1));
    EXPECT_TRUE(check_lifting(corrected, 1));
}

TEST(ExtendLifting, CorrectLiftFromGivenLift) {
    auto r = correct_lift(series({"p1*q1", "p2*q2 + h*p1"}, 2, 1), 0);
    ASSERT_TRUE(std::holds_alternative<Extension>(r));
    const auto& ext = std::get<Extension>(r);
    EXPECT_EQ(ext.lifting.elements(), series({"p1*q1", "p2*q2"}, 2, 1));
    ASSERT_TRUE(ext.correction);
    EXPECT_EQ(ext.correction->m, sys({"0", "p1"}, 2));
    EXPECT_EQ(ext.correction->level, 0u);
}

TEST(ExtendLifting, RejectsInvalidLifting) {
    EXPECT_THROW(Lifting(series({"p1", "q1"}, 1, 0), 0), InvalidLiftError);
}

TEST(ClassifyAnomaly, NonzeroGradedClass) {
    const auto fs = sys({"p1*q1", "p2*q2"}, 2);
    Cochain chi(2, 2, 2);
    chi.add({0, 1}, poly("1", 2));
    auto r = classify_anomaly(chi, fs, 0, 4);
    ASSERT_TRUE(std::holds_alternative<Obstruction>(r));
    const auto& o = std::get<Obstruction>(r);
    EXPECT_EQ(o.kind, Obstruction::Kind::nonzero_graded_class);
    EXPECT_EQ(o.classification(), "nonzero class in graded slice");
    ASSERT_TRUE(o.slice);
    EXPECT_EQ(o.slice->p, 2u);
    EXPECT_EQ(o.slice->internal_degree, 0);
    EXPECT_GE(o.slice->cohomology_dim, 1u);
    EXPECT_TRUE(delta(o.chi, fs).is_zero());
}

TEST(ClassifyAnomaly, NonhomogeneousReportsBoundOnly) {
    const auto fs = sys({"p1*q1 + 1", "p2*q2"}, 2);
    Cochain chi(2, 2, 2);
    chi.add({0, 1}, poly("1", 2));
    auto r = classify_anomaly(chi, fs, 3, 2);
    ASSERT_TRUE(std::holds_alternative<Obstruction>(r));
    const auto& o = std::get<Obstruction>(r);
    EXPECT_EQ(o.kind, Obstruction::Kind::no_solution_within_bound);
    EXPECT_EQ(o.classification(), "no solution within degree bound");
    EXPECT_EQ(o.level, 3u);
    EXPECT_EQ(o.degree_bound, 2);
    EXPECT_FALSE(o.slice);
    EXPECT_NE(o.suggestion().find("above 2"), std::string::npos);
}

TEST(Quantize, DecoupledExamples) {
    for (const auto& fs : {sys({"p1*q1"}, 1), sys({"p1*q1", "p2*q2"}, 2)}) {
        const auto c = certificate(quantize(fs, 5));
        EXPECT_EQ(c.order, 5u);
        EXPECT_EQ(c.F, lift_of(fs, 5));
        EXPECT_TRUE(c.corrections.empty());
        EXPECT_TRUE(c.residuals_vanish);
        EXPECT_TRUE(verify_certificate(c));
    }
}

TEST(Quantize, ShearFamily) {
    const auto fs = sys({"p1 + 2*q1*q2", "p2 + q1^2"}, 2);
    const auto c = certificate(quantize(fs, 3));
    EXPECT_TRUE(verify_certificate(c));
    for (std::size_t i = 0; i < c.F.size(); ++i)
        for (std::size_t j = i + 1; j < c.F.size(); ++j)
            EXPECT_TRUE(star_commutator(c.F[i], c.F[j]).is_zero());
}

TEST(Quantize, EnergySystemsLogCorrections) {
    for (const auto& fs : qlift::testing::energy_corpus()) {
        const auto c = certificate(quantize(fs, 4));
        EXPECT_FALSE(c.corrections.empty()) << format(fs[1]);
        EXPECT_TRUE(verify_certificate(c));
        for (const auto& corr : c.corrections) EXPECT_EQ(delta(Cochain::from_vector(corr.m), fs), -corr.chi);
    }
}

TEST(Quantize, EnergySquareMatchesOperatorSquare) {
    // F2 must agree with H*H + p2 q2 (H = p1^2 + q1^2) up to central constants.
    const auto fs = sys({"p1^2 + q1^2", "(p1^2 + q1^2)^2 + p2*q2"}, 2);
    const auto c = certificate(quantize(fs, 4));
    const HSeries H = HSeries::from_poly(fs[0], 4);
    const HSeries diff = c.F[1] - (star_normal(H, H) + HSeries::from_poly(poly("p2*q2", 2), 4));
    for (const auto& k : diff.coeffs()) EXPECT_TRUE(k.is_constant()) << format(diff);
    EXPECT_EQ(c.F[1][1], poly("4*q1*p1", 2));
}

TEST(Quantize, NonInvolutive) {
    auto r = quantize(sys({"p1", "q1"}, 1), 2);
    ASSERT_TRUE(std::holds_alternative<NotInvolutive>(r));
    EXPECT_EQ(std::get<NotInvolutive>(r).witness.bracket, poly("1", 1));
}

TEST(Quantize, IdempotentOnCommutingSystems) {
    const std::vector<std::vector<Poly>> commuting = {
        sys({"p1", "p2"}, 2),
        sys({"p1*q1", "p2^2"}, 2),
        sys({"p1^2 + q1^2", "p2*q2", "p3"}, 3),
        sys({"q1^3 + q1"}, 1),
    };
    for (const auto& fs : commuting) {
        for (std::size_t i = 0; i < fs.size(); ++i)
            for (std::size_t j = i + 1; j < fs.size(); ++j)
                ASSERT_TRUE(star_commutator(HSeries::from_poly(fs[i], 6), HSeries::from_poly(fs[j], 6)).is_zero());
        const auto c = certificate(quantize(fs, 4));
        EXPECT_EQ(c.F, lift_of(fs, 4));
        EXPECT_TRUE(c.corrections.empty());
    }
}

TEST(VerifyCertificate, DetectsTampering) {
    const auto fs = sys({"p1*q1", "p2*q2"}, 2);
    const Certificate good = certificate(quantize(fs, 5));
    ASSERT_TRUE(verify_certificate(good));

    // hbar q2 added to F1 breaks [F1, F2] at hbar^2
    Certificate paired = good;
    paired.F[0] = paired.F[0].with_coeff(1, poly("q2", 2));
    auto r = verify_certificate(paired);
    ASSERT_FALSE(r);
    ASSERT_TRUE(r.failure);
    EXPECT_EQ(r.failure->i, 0u);
    EXPECT_EQ(r.failure->j, 1u);
    EXPECT_EQ(r.failure->order, 2u);

    // hbar q1 added to F1 still commutes; the log replay catches it
    Certificate quiet = good;
    quiet.F[0] = quiet.F[0].with_coeff(1, poly("q1", 2));
    ASSERT_TRUE(check_lifting(quiet.F, 5));
    auto q = verify_certificate(quiet);
    EXPECT_FALSE(q);
    EXPECT_EQ(q.reason, "series differ from the replayed correction log");

    Certificate wrong_base = good;
    wrong_base.system[1] = poly("p2*q2 + q2", 2);
    auto w = verify_certificate(wrong_base);
    EXPECT_FALSE(w);
    EXPECT_EQ(w.reason, "symbol mismatch at F2");

    Certificate short_series = good;
    short_series.F[1] = short_series.F[1].truncated(3);
    EXPECT_FALSE(verify_certificate(short_series));
}

TEST(Shear, Examples) {
    EXPECT_EQ(gen_involutive_shear(3, {}), sys({"p1", "p2", "p3"}, 3));

    std::vector<ShearStep> s1 = {{ShearStep::Kind::position, poly("q1^2*q2", 2)}};
    EXPECT_EQ(gen_involutive_shear(2, s1), sys({"p1 + 2*q1*q2", "p2 + q1^2"}, 2));

    std::vector<ShearStep> s2 = {{ShearStep::Kind::position, poly("q1^3", 1)},
                                 {ShearStep::Kind::momentum, poly("p1^2", 1)}};
    EXPECT_EQ(gen_involutive_shear(1, s2), sys({"p1 + 3*(q1 + 2*p1)^2"}, 1));

    std::vector<ShearStep> bad = {{ShearStep::Kind::position, poly("q1*p2", 2)}};
    EXPECT_THROW(gen_involutive_shear(2, bad), std::invalid_argument);
    std::vector<ShearStep> bad_momentum = {{ShearStep::Kind::momentum, poly("q1", 1)}};
    EXPECT_THROW(gen_involutive_shear(1, bad_momentum), std::invalid_argument);
}

TEST(LiftProperties, AnomalyIsCocycleAndClassIndependent) {
    const auto corpus = qlift::testing::shear_corpus(24);
    Rng rng(21);
    std::size_t checked = 0;
    for (const auto& fs : corpus) {
        const auto cert = certificate(quantize(fs, 1));
        for (std::size_t l = 0; l <= 1; ++l) {
            const auto G = perturbed_lift(cert.F, l, rng);
            const Cochain chi = anomaly(G, l);
            EXPECT_TRUE(delta(chi, fs).is_zero());

            std::vector<Poly> m;
            for (const auto& f : fs) m.push_back(random_poly(rng, f.pairs(), 3, 3));
            std::vector<HSeries> H;
            for (std::size_t i = 0; i < G.size(); ++i)
                H.push_back(G[i] + HSeries::from_poly(m[i], l + 1).shifted(static_cast<int>(l + 1)));
            EXPECT_EQ(anomaly(H, l) - chi, -delta(Cochain::from_vector(m), fs));
            ++checked;
        }
    }
    EXPECT_GE(checked, 20u);
}

TEST(LiftProperties, ExtensionSoundness) {
    const auto corpus = qlift::testing::shear_corpus(12, 5);
    for (const auto& fs : corpus) {
        Lifting F = Lifting::from_system(fs);
        for (int step = 0; step < 3; ++step) {
            auto next = extend_lifting(F);
            ASSERT_TRUE(std::holds_alternative<Extension>(next));
            F = std::get<Extension>(next).lifting;
            EXPECT_TRUE(check_lifting(F.elements(), F.level()));
            EXPECT_EQ(F.base(), fs);
        }
    }
}

TEST(LiftProperties, CertificatesVerifyAndTampersAreCaught) {
    auto corpus = qlift::testing::shear_corpus(20, 9);
    for (auto& fs : qlift::testing::energy_corpus()) corpus.push_back(fs);
    Rng rng(22);
    for (const auto& fs : corpus) {
        const auto c = certificate(quantize(fs, 3));
        ASSERT_TRUE(verify_certificate(c));

        std::uniform_int_distribution<std::size_t> which(0, c.F.size() - 1);
        std::uniform_int_distribution<std::size_t> order(0, c.order);
        std::uniform_int_distribution<std::size_t> slot(0, 2 * fs.front().pairs() - 1);
        for (int t = 0; t < 5; ++t) {
            Certificate bad = c;
            const std::size_t i = which(rng);
            const std::size_t k = order(rng);
            Exponent e(2 * fs.front().pairs(), 0);
            ++e[slot(rng)];
            Poly bumped = bad.F[i][k];
            bumped.accumulate(e, Rational(1));
            bad.F[i] = bad.F[i].with_coeff(k, bumped);
            EXPECT_FALSE(verify_certificate(bad));
        }
    }
}
