#include <cmath>

#include <gtest/gtest.h>

#include <lyapinv/spherical.hpp>

#include "test_util.hpp"

using namespace lyapinv;
using testutil::diag;

namespace {

/// s_mu(x) = det(x_i^{mu_j + N - j}) / det(x_i^{N - j}) for distinct x.
Rational bialternant(const Partition& mu, const std::vector<Rational>& x) {
    const std::size_t n = x.size();
    auto alternant = [&](auto exponent) {
        std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Rational v = 1;
                for (int e = 0; e < exponent(j); ++e) v *= x[i];
                a[i][j] = v;
            }
        return detail::small_determinant<Rational>(a);
    };
    const auto num = alternant([&](std::size_t j) { return mu[j] + static_cast<int>(n - 1 - j); });
    const auto den = alternant([&](std::size_t j) { return static_cast<int>(n - 1 - j); });
    return num / den;
}

std::vector<Partition> even_partitions_up_to(int max_weight, int max_rows) {
    std::vector<Partition> out;
    for (int w = 2; w <= max_weight; w += 2)
        for (auto& p : partitions_of(w, max_rows))
            if (p.is_even()) out.push_back(p);
    return out;
}

}  // namespace

TEST(SphericalPhi, ElementaryAtTwoTwo) {
    RngStream rng(21);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> a(4);
        for (auto& x : a) x = 0.1 + 3.0 * rng.uniform();
        double e2 = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) e2 += a[i] * a[j];
        EXPECT_NEAR(spherical_phi(Partition{2, 2}, a), e2 / 6.0, 1e-13 * e2);
    }
}

TEST(SphericalPhi, NormalisedAtIdentity) {
    for (int n = 1; n <= 5; ++n)
        for (const auto& mu : even_partitions_up_to(10, n))
            EXPECT_NEAR(spherical_phi(mu, std::vector<double>(n, 1.0)), 1.0, 1e-13) << mu;
}

TEST(SphericalPhi, FourFourIsDeterminantPower) {
    const double s1 = 1.7, s2 = 0.6;
    EXPECT_NEAR(spherical_phi(Partition{4, 4}, {s1 * s1, s2 * s2}), std::pow(s1 * s2, 4), 1e-14);
}

TEST(SphericalPhi, RationalPathIsExact) {
    const std::vector<Rational> a{Rational(1, 4), Rational(9), Rational(4)};
    // phi_(2) = (a1 + a2 + a3) / 3.
    EXPECT_EQ(spherical_phi<Rational>(Partition{2}, std::span<const Rational>(a)),
              (Rational(1, 4) + 9 + 4) / 3);
}

TEST(SphericalPhi, Errors) {
    EXPECT_THROW(spherical_phi(Partition{3}, {1.0, 1.0}), OddPartition);
    EXPECT_THROW(spherical_phi(Partition{2}, {1.0, 0.0}), InvalidPoint);
    EXPECT_THROW(spherical_phi(Partition{2}, {1.0, -1.0}), InvalidPoint);
    EXPECT_THROW(spherical_phi(Partition{2, 2, 2}, {1.0, 1.0}), InvalidPartition);
}

TEST(FMu, OddPartsVanish) {
    RngStream rng(22);
    const Matrix m = random_with_singular_values(log_uniform(3, 0.5, 2.0, rng), rng);
    EXPECT_EQ(F_mu(Partition{3}, m), 0.0);
    EXPECT_EQ(F_mu(Partition{2, 1}, m), 0.0);
}

TEST(FMu, AllTwosIsDeterminantSquared) {
    RngStream rng(23);
    const Matrix m = random_with_singular_values(log_uniform(4, 0.5, 2.0, rng), rng);
    const double det = m.determinant();
    EXPECT_NEAR(F_mu(Partition{2, 2, 2, 2}, m), det * det, 1e-12 * det * det);
}

TEST(FMu, DegreeTwoInTwoVariables) {
    const double s1 = 0.8, s2 = 2.5;
    EXPECT_NEAR(F_mu(Partition{2}, diag({s1, s2})), (s1 * s1 + s2 * s2) / 2.0, 1e-14);
}

TEST(FMu, BiOrthogonalInvariance) {
    RngStream rng(24);
    for (int t = 0; t < 50; ++t) {
        const Matrix m = random_with_singular_values(log_uniform(3, 0.3, 3.0, rng), rng);
        const Matrix k1 = haar_orthogonal(3, rng), k2 = haar_orthogonal(3, rng);
        for (const auto& mu : even_partitions_up_to(8, 3)) {
            const double a = F_mu(mu, m), b = F_mu(mu, k1 * m * k2);
            EXPECT_NEAR(a, b, 1e-10 * std::abs(a)) << mu;
        }
    }
}

TEST(FMu, PositiveOnEvenPartitions) {
    RngStream rng(25);
    for (int t = 0; t < 1000; ++t) {
        const int n = 1 + static_cast<int>(rng() % 5);
        const auto mus = even_partitions_up_to(10, n);
        const auto& mu = mus[rng() % mus.size()];
        const Matrix m = random_with_singular_values(log_uniform(n, 0.1, 10.0, rng), rng);
        ASSERT_GT(F_mu(mu, m), 0.0) << mu;
    }
}

TEST(SchurCharacter, SmallCases) {
    RngStream rng(26);
    const Matrix x = gaussian_matrix(3, 3, rng);
    const double tr = x.trace(), tr2 = (x * x).trace();
    EXPECT_NEAR(schur_character(Partition{1}, x), tr, 1e-14);
    EXPECT_NEAR(schur_character(Partition{1, 1}, x), (tr * tr - tr2) / 2.0, 1e-13);
    EXPECT_NEAR(schur_character(Partition{2, 2}, diag({1.5, -0.5})), 1.5 * 1.5 * 0.25, 1e-14);
    EXPECT_EQ(schur_character(Partition{1, 1, 1, 1}, x), 0.0);
    EXPECT_EQ(schur_character(Partition{}, x), 1.0);
}

TEST(SchurCharacter, ExactNewtonPathMatchesBialternant) {
    const std::vector<Rational> x{Rational(1, 2), Rational(3), Rational(-2), Rational(5, 3)};
    for (int w = 1; w <= 8; ++w)
        for (const auto& mu : partitions_of(w, 4)) {
            std::vector<Rational> p(schur_degree(mu), Rational(0));
            for (std::size_t j = 0; j < p.size(); ++j)
                for (const auto& xi : x) {
                    Rational v = 1;
                    for (std::size_t e = 0; e <= j; ++e) v *= xi;
                    p[j] += v;
                }
            EXPECT_EQ(schur_from_power_sums<Rational>(mu, std::span<const Rational>(p)), bialternant(mu, x)) << mu;
        }
}

TEST(FMuMc, OddDegreeAveragesToZero) {
    RngStream rng(27);
    const Matrix m = random_with_singular_values(log_uniform(3, 0.5, 2.0, rng), rng);
    const auto e = F_mu_mc(Partition{1}, m, 20000, RngStream(28));
    EXPECT_LE(std::abs(e.value), 3.0 * e.std_error);
}

TEST(FMuMc, IdentityGivesOne) {
    const auto e = F_mu_mc(Partition{2, 2}, Matrix::Identity(2, 2), 20000, RngStream(29));
    EXPECT_TRUE(testutil::within_3sigma(e.value, 1.0, e.std_error));
}

TEST(FMuMc, AgreesWithSphericalFormula) {
    const Matrix m = diag({1.0, 2.0, 3.0});
    const auto e = F_mu_mc(Partition{2}, m, 100000, RngStream(30));
    EXPECT_NEAR(F_mu(Partition{2}, m), 14.0 / 3.0, 1e-13);
    EXPECT_LE(std::abs(e.value - F_mu(Partition{2}, m)), 3.0 * e.std_error);
}

TEST(FMuMc, SharedDrawsMatchSingleCalls) {
    const Matrix m = diag({0.5, 2.0});
    const std::vector<Partition> mus{{2}, {2, 2}, {4}};
    const auto many = F_mu_mc_many(mus, m, 500, RngStream(31));
    for (std::size_t i = 0; i < mus.size(); ++i) {
        const auto one = F_mu_mc(mus[i], m, 500, RngStream(31));
        EXPECT_DOUBLE_EQ(many[i].value, one.value);
    }
}
