#pragma once

// Spherical polynomials of GL_N(R)/O_N(R), the orthogonal average of GL_N
// characters F_mu(M) = int_{O_N} tr rho_mu(psi M) dpsi, and Schur characters
// via Newton's identities and the Jacobi-Trudi determinant.
//
// F_mu vanishes when mu has an odd part. For even mu = 2 lambda,
//   F_mu(M) = phi_mu(M) = P_lambda^{(2)}(a) / P_lambda^{(2)}(1^N),
// where a are the squared singular values of M.

#include <cmath>
#include <span>
#include <vector>

#include "errors.hpp"
#include "jack.hpp"
#include "linalg.hpp"
#include "montecarlo.hpp"
#include "partition.hpp"
#include "rng.hpp"

namespace lyapinv {

/// Zonal polynomials are the Jack polynomials at this parameter.
inline const Rational kZonalAlpha = 2;

/// phi_mu at a point of squared singular values.
template <class T>
T spherical_phi(const Partition& mu, std::span<const T> svals_squared) {
    if (!mu.is_even()) throw OddPartition("spherical_phi: partition has an odd part");
    const int n = static_cast<int>(svals_squared.size());
    if (mu.length() > static_cast<std::size_t>(n)) throw InvalidPartition("spherical_phi: too many parts");
    for (const auto& a : svals_squared)
        if (!(a > T(0))) throw InvalidPoint("spherical_phi: squared singular values must be positive");
    const SymPolyM p = jack_in_monomials(mu.halved(), kZonalAlpha, n);
    return eval_sympoly<T>(p, svals_squared) / convert_rational<T>(eval_at_ones(p));
}

inline double spherical_phi(const Partition& mu, const std::vector<double>& svals_squared) {
    return spherical_phi<double>(mu, std::span<const double>(svals_squared));
}

/// F_mu from the squared singular values of M.
template <class T>
T F_mu_from_svals(const Partition& mu, std::span<const T> svals_squared) {
    if (mu.length() > svals_squared.size()) throw InvalidPartition("F_mu: too many parts");
    if (!mu.is_even()) return T(0);
    return spherical_phi<T>(mu, svals_squared);
}

inline double F_mu(const Partition& mu, const Matrix& m) {
    require_square(m, "M");
    if (mu.length() > static_cast<std::size_t>(m.rows())) throw InvalidPartition("F_mu: too many parts");
    if (!mu.is_even()) return 0.0;
    const auto a = squared_singular_values(m);
    for (double x : a)
        if (!(x > 0.0)) throw DegenerateMatrix("F_mu: singular matrix");
    return spherical_phi<double>(mu, std::span<const double>(a));
}

namespace detail {

/// Determinant by Gaussian elimination; partial pivoting on magnitude for
/// floating types, first nonzero pivot for exact types.
template <class T>
T small_determinant(std::vector<std::vector<T>> a) {
    const std::size_t n = a.size();
    T det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        if constexpr (std::is_floating_point_v<T>) {
            for (std::size_t r = c + 1; r < n; ++r)
                if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        } else {
            while (piv < n && a[piv][c] == 0) ++piv;
            if (piv == n) return T(0);
        }
        if (a[piv][c] == T(0)) return T(0);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const T f = a[r][c] / a[c][c];
            if (f == T(0)) continue;
            for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return det;
}

}  // namespace detail

/// Complete homogeneous values h_0..h_d from power sums p_1..p_d by
/// Newton's identities j h_j = sum_{i=1}^{j} p_i h_{j-i}. `power_sums[i]`
/// holds p_{i+1}.
template <class T>
std::vector<T> complete_from_power_sums(std::span<const T> power_sums, std::size_t degree) {
    std::vector<T> h(degree + 1, T(0));
    h[0] = T(1);
    for (std::size_t j = 1; j <= degree; ++j) {
        T s(0);
        for (std::size_t i = 1; i <= j; ++i) s += power_sums[i - 1] * h[j - i];
        h[j] = s / T(static_cast<int>(j));
    }
    return h;
}

/// Schur function s_mu from power sums via Jacobi-Trudi: det[h_{mu_i - i + j}].
/// Needs p_1 .. p_{mu_1 + l(mu) - 1}.
template <class T>
T schur_from_power_sums(const Partition& mu, std::span<const T> power_sums) {
    const std::size_t len = mu.length();
    if (len == 0) return T(1);
    const std::size_t degree = static_cast<std::size_t>(mu[0]) + len - 1;
    if (power_sums.size() < degree) throw Error("schur_from_power_sums: not enough power sums");
    const auto h = complete_from_power_sums<T>(power_sums, degree);
    std::vector<std::vector<T>> jt(len, std::vector<T>(len, T(0)));
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = 0; j < len; ++j) {
            const long idx = static_cast<long>(mu[i]) - static_cast<long>(i) + static_cast<long>(j);
            if (idx >= 0) jt[i][j] = h[static_cast<std::size_t>(idx)];
        }
    return detail::small_determinant<T>(std::move(jt));
}

/// Power sums tr(X), tr(X^2), ..., tr(X^d).
inline std::vector<double> trace_powers(const Matrix& x, std::size_t degree) {
    std::vector<double> p(degree);
    Matrix pw = x;
    for (std::size_t j = 0; j < degree; ++j) {
        if (j) pw = pw * x;
        p[j] = pw.trace();
    }
    return p;
}

inline std::size_t schur_degree(const Partition& mu) {
    return mu.empty() ? 0 : static_cast<std::size_t>(mu[0]) + mu.length() - 1;
}

/// Character tr rho_mu(X) of the GL_N irreducible with highest weight mu.
inline double schur_character(const Partition& mu, const Matrix& x) {
    require_square(x, "X");
    if (mu.length() > static_cast<std::size_t>(x.rows())) return 0.0;
    const auto p = trace_powers(x, schur_degree(mu));
    return schur_from_power_sums<double>(mu, std::span<const double>(p));
}

/// Haar averages of tr rho_mu(psi M) over O_N for several mu, sharing the
/// same draws of psi. One estimate per entry of `mus`.
inline std::vector<Estimate> F_mu_mc_many(const std::vector<Partition>& mus, const Matrix& m, std::size_t nsamples,
                                          const RngStream& rng, unsigned workers = 1) {
    require_square(m, "M");
    const auto n = m.rows();
    std::size_t degree = 0;
    for (const auto& mu : mus) {
        if (mu.length() > static_cast<std::size_t>(n)) throw InvalidPartition("F_mu_mc: too many parts");
        degree = std::max(degree, schur_degree(mu));
    }
    auto accs = parallel_samples<std::vector<RunningStats>>(
        nsamples, workers, rng, [&] { return std::vector<RunningStats>(mus.size()); },
        [&](RngStream& r, std::vector<RunningStats>& acc) {
            const Matrix x = haar_orthogonal(n, r) * m;
            const auto p = trace_powers(x, degree);
            for (std::size_t i = 0; i < mus.size(); ++i)
                acc[i].add(schur_from_power_sums<double>(mus[i], std::span<const double>(p)));
        });
    std::vector<Estimate> out;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        RunningStats total;
        for (const auto& a : accs) total.merge(a[i]);
        out.push_back(total.estimate());
    }
    return out;
}

/// Monte Carlo estimate of F_mu(M) straight from its definition.
inline Estimate F_mu_mc(const Partition& mu, const Matrix& m, std::size_t nsamples, const RngStream& rng,
                        unsigned workers = 1) {
    return F_mu_mc_many({mu}, m, nsamples, rng, workers).front();
}

}  // namespace lyapinv
