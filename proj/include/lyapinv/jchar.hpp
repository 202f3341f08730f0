#pragma once

// The Haar-averaged characteristic polynomial
//
//   J(B1, B2; u) = int_{O_k} int_{O_{n-k}} det(Id - u (psi2 B2) (x) (psi1 B1)^{-T}) dpsi2 dpsi1
//                = sum_j c_j u^j,
//
// evaluated exactly through the dual Cauchy decomposition of the exterior
// powers of a tensor product:
//
//   c_j = (-1)^j sum_{|lambda| = j, l(lambda) <= k, lambda_1 <= n-k} F_{lambda'}(B2) F_lambda(B1^{-1}).
//
// The inverse on B1 comes from the integrand: the GL_k factor acts through
// (psi1 B1)^{-T}, and F only sees singular values, so F_lambda is taken at
// B1^{-1}. Only partitions with lambda and lambda' both even contribute,
// which forces 4 | j and c_j >= 0.

#include <cmath>
#include <span>
#include <vector>

#include "errors.hpp"
#include "grassmann.hpp"
#include "linalg.hpp"
#include "montecarlo.hpp"
#include "partition.hpp"
#include "rng.hpp"
#include "spherical.hpp"

namespace lyapinv {

/// Coefficients c_0 .. c_{k(n-k)} of J(B1, B2; u).
template <class T>
struct BasicCharPolyJ {
    int k = 0;
    int n_minus_k = 0;
    std::vector<T> coeffs;

    T operator()(const T& u) const {
        T acc(0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
        return acc;
    }
};

using CharPolyJ = BasicCharPolyJ<double>;
using CharPolyJExact = BasicCharPolyJ<Rational>;

/// Partitions lambda of weight j in the k x (n-k) box with lambda and its
/// conjugate both even: the only terms that survive the orthogonal average.
inline std::vector<Partition> contributing_partitions(int j, int k, int n_minus_k) {
    std::vector<Partition> out;
    for (auto& lambda : partitions_in_box(j, k, n_minus_k))
        if (lambda.is_even() && lambda.conjugate().is_even()) out.push_back(std::move(lambda));
    return out;
}

/// J from the squared singular values of B1 (length k) and B2 (length n-k).
template <class T>
BasicCharPolyJ<T> j_from_svals(std::span<const T> b1_sq, std::span<const T> b2_sq) {
    const int k = static_cast<int>(b1_sq.size());
    const int m = static_cast<int>(b2_sq.size());
    if (k < 1 || m < 1) throw Error("J: both blocks must be non-empty");
    std::vector<T> inv_sq;
    inv_sq.reserve(k);
    for (const auto& a : b1_sq) {
        if (!(a > T(0))) throw DegenerateMatrix("J: B1 is singular");
        inv_sq.push_back(T(1) / a);
    }
    for (const auto& b : b2_sq)
        if (!(b > T(0))) throw DegenerateMatrix("J: B2 is singular");

    BasicCharPolyJ<T> out;
    out.k = k;
    out.n_minus_k = m;
    out.coeffs.assign(static_cast<std::size_t>(k * m) + 1, T(0));
    for (int j = 0; j <= k * m; ++j) {
        T c(0);
        for (const auto& lambda : contributing_partitions(j, k, m)) {
            c += F_mu_from_svals<T>(lambda.conjugate(), b2_sq) *
                 F_mu_from_svals<T>(lambda, std::span<const T>(inv_sq));
        }
        out.coeffs[static_cast<std::size_t>(j)] = (j % 2 == 0) ? c : T(T(0) - c);
    }
    return out;
}

/// Exact-structure evaluation of J(B1, B2; .) in floating point.
inline CharPolyJ j_exact(const Matrix& b1, const Matrix& b2) {
    require_square(b1, "B1");
    require_square(b2, "B2");
    const auto a = squared_singular_values(b1);
    const auto b = squared_singular_values(b2);
    for (double x : a)
        if (!(x > 0.0)) throw DegenerateMatrix("j_exact: B1 is singular");
    return j_from_svals<double>(std::span<const double>(a), std::span<const double>(b));
}

/// Fully rational evaluation when the squared singular values are rational.
inline CharPolyJExact j_exact_rational(const std::vector<Rational>& b1_sq, const std::vector<Rational>& b2_sq) {
    return j_from_svals<Rational>(std::span<const Rational>(b1_sq), std::span<const Rational>(b2_sq));
}

/// Monte Carlo of J at several u, from the integrand, sharing draws of (psi1, psi2).
inline std::vector<Estimate> j_mc_many(const Matrix& b1, const Matrix& b2, const std::vector<double>& us,
                                       std::size_t nsamples, const RngStream& rng, unsigned workers = 1) {
    require_square(b1, "B1");
    require_square(b2, "B2");
    inverse_checked(b1);
    const auto k = b1.rows();
    const auto m = b2.rows();
    const auto dim = k * m;
    auto accs = parallel_samples<std::vector<RunningStats>>(
        nsamples, workers, rng, [&] { return std::vector<RunningStats>(us.size()); },
        [&](RngStream& r, std::vector<RunningStats>& acc) {
            const Matrix psi1 = haar_orthogonal(k, r);
            const Matrix psi2 = haar_orthogonal(m, r);
            const Matrix op = kron_operator(psi2 * b2, psi1 * b1);
            for (std::size_t i = 0; i < us.size(); ++i)
                acc[i].add(determinant(Matrix::Identity(dim, dim) - us[i] * op));
        });
    std::vector<Estimate> out;
    for (std::size_t i = 0; i < us.size(); ++i) {
        RunningStats total;
        for (const auto& a : accs) total.merge(a[i]);
        out.push_back(total.estimate());
    }
    return out;
}

inline Estimate j_mc(const Matrix& b1, const Matrix& b2, double u, std::size_t nsamples, const RngStream& rng,
                     unsigned workers = 1) {
    return j_mc_many(b1, b2, {u}, nsamples, rng, workers).front();
}

/// Average of det(Id - DL) where DL is the derivative of the chart map of
/// B = W [[psi1 B1, X], [0, psi2 B2]] W^T at the invariant subspace W span(e_1..e_k),
/// with psi1, psi2, W Haar and X Gaussian. Equals J(B1, B2; 1).
inline Estimate chart_jacobian_mean(const Matrix& b1, const Matrix& b2, std::size_t nsamples, const RngStream& rng,
                                    unsigned workers = 1) {
    require_square(b1, "B1");
    require_square(b2, "B2");
    const auto k = b1.rows();
    const auto m = b2.rows();
    const auto n = k + m;
    return mc_mean(
        nsamples, rng,
        [&](RngStream& r) {
            Matrix b = Matrix::Zero(n, n);
            b.topLeftCorner(k, k) = haar_orthogonal(k, r) * b1;
            b.bottomRightCorner(m, m) = haar_orthogonal(m, r) * b2;
            b.topRightCorner(k, m) = gaussian_matrix(k, m, r);
            const Matrix w = haar_orthogonal(n, r);
            const Matrix rotated = w * b * w.transpose();
            const SubspaceFrame g(w.leftCols(k));
            const Matrix dl = induced_chart_derivative(rotated, g);
            return determinant(Matrix::Identity(dl.rows(), dl.cols()) - dl);
        },
        workers);
}

struct JAtOne {
    double value = 0.0;
    bool pass = false;
};

/// J(B1, B2; 1) >= 1, checked on the exact path with 1e-9 slack.
inline JAtOne j_at_one_check(const Matrix& b1, const Matrix& b2) {
    const double v = j_exact(b1, b2)(1.0);
    return {v, v >= 1.0 - 1e-9};
}

}  // namespace lyapinv
