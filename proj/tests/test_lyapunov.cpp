#include <cmath>

#include <gtest/gtest.h>

#include <lyapinv/lyapunov.hpp>

#include "test_util.hpp"

using namespace lyapinv;
using testutil::diag;
using testutil::rotation;
using testutil::within_3sigma;

namespace {

MeasureModel skewed_orbit() { return MeasureModel::left_haar_orbit(diag({3.0, 1.0, 1.0 / 3.0})); }

}  // namespace

TEST(MeasureModel, Validation) {
    EXPECT_THROW(MeasureModel::point_mass(diag({1.0, 0.0})), DegenerateMatrix);
    EXPECT_THROW(MeasureModel::two_sided_haar_orbit(testutil::vec({1.0, 0.0})), DegenerateMatrix);
    EXPECT_THROW(MeasureModel::left_haar_orbit(Matrix::Ones(2, 3)), Error);
    EXPECT_FALSE(MeasureModel::point_mass(diag({1.0, 2.0})).orthogonally_invariant());
    EXPECT_TRUE(skewed_orbit().orthogonally_invariant());
    EXPECT_EQ(skewed_orbit().kind(), "left");
    EXPECT_NEAR(MeasureModel::two_sided_haar_orbit(testutil::vec({2.0, 0.25})).log_abs_det(), std::log(0.5), 1e-15);
}

TEST(Sample, PointMassIsExact) {
    RngStream rng(71);
    const Matrix a = diag({2.0, 1.0, 0.5});
    const auto model = MeasureModel::point_mass(a);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(sample(model, rng), a);
}

TEST(Sample, OrbitsPreserveSingularValuesAndDeterminant) {
    RngStream rng(72);
    const Matrix a0 = diag({4.0, 2.0, 0.5});
    const auto left = MeasureModel::left_haar_orbit(a0);
    const auto two = MeasureModel::two_sided_haar_orbit(testutil::vec({4.0, 2.0, 0.5}));
    for (int i = 0; i < 50; ++i) {
        const auto sv = squared_singular_values(sample(left, rng));
        EXPECT_NEAR(std::sqrt(sv[0]), 4.0, 1e-10);
        EXPECT_NEAR(std::sqrt(sv[1]), 2.0, 1e-10);
        EXPECT_NEAR(std::sqrt(sv[2]), 0.5, 1e-10);
        EXPECT_NEAR(std::abs(sample(two, rng).determinant()), 4.0, 1e-10);
    }
}

TEST(LyapunovQr, PointMassDiagonal) {
    RngStream rng(73);
    const auto e = lyapunov_spectrum_qr(MeasureModel::point_mass(diag({2.0, 1.0, 0.5})), 10000, rng);
    EXPECT_NEAR(e.r[0], std::log(2.0), 1e-6);
    EXPECT_NEAR(e.r[1], 0.0, 1e-6);
    EXPECT_NEAR(e.r[2], -std::log(2.0), 1e-6);
    EXPECT_EQ(e.m, 10000u);
}

TEST(LyapunovQr, PointMassConvergesAtRateOneOverM) {
    // The bias is a deterministic transient of size O(1/m); its constant
    // depends on the eigenvector basis, not only on the condition number.
    RngStream rng(74);
    int tested = 0;
    while (tested < 20) {
        const Matrix a = random_with_singular_values(log_uniform(4, 0.3, 3.0, rng), rng);
        const Eigen::JacobiSVD<Matrix> svd(a);
        if (svd.singularValues()[0] / svd.singularValues()[3] > 100.0) continue;
        const auto logs = eig_log_moduli(a);
        bool distinct = true;
        for (int i = 0; i + 1 < 4; ++i) distinct = distinct && logs.values[i] - logs.values[i + 1] > 0.05;
        if (!distinct) continue;
        const auto model = MeasureModel::point_mass(a);
        const auto short_run = lyapunov_spectrum_qr(model, 10000, rng);
        const auto long_run = lyapunov_spectrum_qr(model, 40000, rng);
        for (int i = 0; i < 4; ++i) {
            const double e1 = std::abs(short_run.r[i] - logs.values[i]);
            const double e4 = std::abs(long_run.r[i] - logs.values[i]);
            EXPECT_LE(e1, 1e-3);
            EXPECT_LE(e4, e1 / 3.0 + 1e-9);
        }
        ++tested;
    }
}

TEST(LyapunovQr, OrthogonalOrbitHasZeroExponents) {
    RngStream rng(75);
    const auto e = lyapunov_spectrum_qr(MeasureModel::left_haar_orbit(Matrix::Identity(4, 4)), 2000, rng);
    for (double r : e.r) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(LyapunovQr, SumIsExpectedLogDet) {
    RngStream rng(76);
    const auto model = MeasureModel::two_sided_haar_orbit(testutil::vec({3.0, 1.5, 0.2}));
    const auto e = lyapunov_spectrum_qr(model, 5000, rng);
    EXPECT_NEAR(e.partial_sum(3).value, model.log_abs_det(), 1e-10);
}

TEST(LyapunovQr, ExponentsAreMonotone) {
    RngStream rng(77);
    const auto e = lyapunov_spectrum_qr(skewed_orbit(), 20000, rng);
    for (std::size_t i = 0; i + 1 < e.r.size(); ++i)
        EXPECT_GE(e.r[i] + 2.0 * std::hypot(e.std_error[i], e.std_error[i + 1]), e.r[i + 1]);
    EXPECT_GE(lyapunov_batches(20000), 20u);
}

TEST(TopkSumGrassmann, ScalarAndOrthogonalModels) {
    RngStream rng(78);
    for (std::size_t k = 1; k < 4; ++k) {
        const auto e = topk_sum_grassmann(MeasureModel::left_haar_orbit(2.5 * Matrix::Identity(4, 4)), k, 200, rng);
        EXPECT_NEAR(e.value, static_cast<double>(k) * std::log(2.5), 1e-12);
        EXPECT_NEAR(e.std_error, 0.0, 1e-12);
    }
    const Matrix u0 = haar_orthogonal(3, rng);
    EXPECT_NEAR(topk_sum_grassmann(MeasureModel::left_haar_orbit(u0), 1, 200, rng).value, 0.0, 1e-12);
    EXPECT_THROW(topk_sum_grassmann(MeasureModel::point_mass(diag({2.0, 1.0})), 1, 10, rng), Error);
    EXPECT_THROW(topk_sum_grassmann(skewed_orbit(), 3, 10, rng), Error);
}

TEST(Estimators, QrAndGrassmannAgree) {
    RngStream rng(79);
    const auto model = skewed_orbit();
    RngStream chain = rng.substream(0);
    const auto qr = lyapunov_spectrum_qr(model, 30000, chain);
    for (std::size_t k = 1; k <= 2; ++k) {
        const auto g = topk_sum_grassmann(model, k, 30000, rng.substream(k));
        const auto p = qr.partial_sum(k);
        EXPECT_LE(std::abs(g.value - p.value), 3.0 * std::hypot(g.std_error, p.std_error))
            << "k=" << k << " grassmann " << g.value << " qr " << p.value;
    }
}

TEST(Estimators, TwoSidedOrbitAgrees) {
    RngStream rng(80);
    const auto model = MeasureModel::two_sided_haar_orbit(testutil::vec({2.0, 1.2, 0.7, 0.3}));
    RngStream chain = rng.substream(0);
    const auto qr = lyapunov_spectrum_qr(model, 20000, chain);
    for (std::size_t k = 1; k <= 3; ++k) {
        const auto g = topk_sum_grassmann(model, k, 20000, rng.substream(k));
        const auto p = qr.partial_sum(k);
        EXPECT_LE(std::abs(g.value - p.value), 3.0 * std::hypot(g.std_error, p.std_error)) << "k=" << k;
    }
}

TEST(MeanExponentLhs, Examples) {
    RngStream rng(81);
    EXPECT_DOUBLE_EQ(mean_exponent_lhs(MeasureModel::point_mass(diag({2.0, 1.0, 0.5})), 2, 10, rng).value,
                     std::log(2.0));
    EXPECT_NEAR(mean_exponent_lhs(MeasureModel::left_haar_orbit(Matrix::Identity(3, 3)), 2, 500, rng).value, 0.0,
                1e-12);
}

TEST(SupInvariantLhs, Examples) {
    RngStream rng(82);
    const auto rot = sup_invariant_lhs(MeasureModel::left_haar_orbit(Matrix::Identity(2, 2)), 1, 1000, rng);
    EXPECT_NEAR(rot.estimate.value, 0.0, 1e-12);
    EXPECT_EQ(rot.pointwise_violations, 0u);

    const auto pm = sup_invariant_lhs(MeasureModel::point_mass(diag({3.0, 2.0, 1.0})), 2, 10, rng);
    EXPECT_NEAR(pm.estimate.value, std::log(6.0), 1e-15);
    EXPECT_EQ(pm.rejected, 0u);
    EXPECT_FALSE(pm.flagged());

    const auto repeated = sup_invariant_lhs(MeasureModel::point_mass(Matrix::Identity(2, 2)), 1, 10, rng);
    EXPECT_EQ(repeated.rejected, 10u);
    EXPECT_TRUE(repeated.flagged());
}

TEST(MainInequality, SkewedOrbitHoldsWithMargin) {
    RngStream rng(83);
    const auto model = skewed_orbit();
    const auto g = grassmann_positive_mean(model, 1, 20000, rng.substream(2));
    const auto eig = mean_exponent_lhs(model, 1, 20000, rng.substream(0));
    const auto sup = sup_invariant_lhs(model, 1, 20000, rng.substream(1));
    EXPECT_GT(eig.value, 0.0);
    EXPECT_GE(eig.value, g.value / 3.0 - 3.0 * std::hypot(eig.std_error, g.std_error / 3.0));
    EXPECT_GE(sup.estimate.value, g.value / 3.0 - 3.0 * std::hypot(sup.estimate.std_error, g.std_error / 3.0));
    EXPECT_EQ(sup.pointwise_violations, 0u);

    const auto full = verify_main_inequality(model, 1, 20000, rng);
    EXPECT_TRUE(full.holds());
    EXPECT_GT(full.margin(), 0.0);
    EXPECT_DOUBLE_EQ(full.rhs, full.grassmann_mean.value / 3.0);
}

TEST(MainInequality, OrthogonalOrbitIsDegenerateEquality) {
    RngStream rng(84);
    const auto r = verify_main_inequality(MeasureModel::left_haar_orbit(Matrix::Identity(3, 3)), 1, 2000, rng);
    EXPECT_NEAR(r.sup_lhs.estimate.value, 0.0, 1e-12);
    EXPECT_NEAR(r.rhs, 0.0, 1e-12);
    EXPECT_TRUE(r.holds());
}

TEST(JensenChain, PositivePartOfSumBoundedByMeanOfPositiveParts) {
    RngStream rng(85);
    const auto model = MeasureModel::two_sided_haar_orbit(testutil::vec({2.0, 0.9, 0.4}));
    for (std::size_t k = 1; k <= 2; ++k) {
        const auto s = topk_sum_grassmann(model, k, 20000, rng.substream(k));
        const auto p = grassmann_positive_mean(model, k, 20000, rng.substream(10 + k));
        EXPECT_LE(std::max(0.0, s.value), p.value + 3.0 * std::hypot(s.std_error, p.std_error));
    }
}

TEST(SpecialLinear, TopSumsNonnegativeWhenDetIsOne) {
    RngStream rng(86);
    // Singular values with product one.
    const auto model = MeasureModel::two_sided_haar_orbit(testutil::vec({4.0, 0.5, 0.5}));
    ASSERT_NEAR(model.log_abs_det(), 0.0, 1e-15);
    for (int t = 0; t < 10000; ++t) {
        const auto logs = eig_log_moduli(sample(model, rng));
        for (std::size_t k = 1; k <= 3; ++k) ASSERT_GE(logs.top_sum(k), -1e-10) << "k=" << k;
    }
}

TEST(Binomial, SmallValues) {
    EXPECT_EQ(binomial(4, 2), 6.0);
    EXPECT_EQ(binomial(3, 0), 1.0);
    EXPECT_EQ(binomial(2, 3), 0.0);
}
