#pragma once

// Orthogonally invariant measure models on GL_n(R) and estimators of the
// random Lyapunov exponents r_1 >= ... >= r_n:
//
//  * the QR cocycle along one long product g_m ... g_1, and
//  * the Grassmannian average E_{A, g} log|det A|_g|, which equals
//    r_1 + ... + r_k for invariant models.
//
// Also the Monte Carlo sides of the mean-exponent inequality in its Haar
// form: E_U sup_{g fixed by UA} log+|det UA|_g| >= C(n,k)^{-1} E_g log+|det A|_g|.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "grassmann.hpp"
#include "linalg.hpp"
#include "montecarlo.hpp"
#include "rng.hpp"

namespace lyapinv {

struct PointMass {
    Matrix a;
};

/// U * a0 with U Haar on O(n).
struct LeftHaarOrbit {
    Matrix a0;
};

/// U * diag(d) * V with U, V independent Haar on O(n).
struct TwoSidedHaarOrbit {
    Vector d;
};

/// A probability measure on GL_n(R). Both orbit variants are orthogonally
/// invariant and compactly supported, so log+|A| and log+|A^{-1}| are
/// integrable automatically.
class MeasureModel {
public:
    using Variant = std::variant<PointMass, LeftHaarOrbit, TwoSidedHaarOrbit>;

    static MeasureModel point_mass(Matrix a) { return MeasureModel(PointMass{std::move(a)}); }
    static MeasureModel left_haar_orbit(Matrix a0) { return MeasureModel(LeftHaarOrbit{std::move(a0)}); }
    static MeasureModel two_sided_haar_orbit(Vector d) { return MeasureModel(TwoSidedHaarOrbit{std::move(d)}); }

    Eigen::Index n() const { return n_; }
    const Variant& variant() const { return v_; }
    bool orthogonally_invariant() const { return !std::holds_alternative<PointMass>(v_); }

    std::string kind() const {
        return std::visit(
            [](const auto& m) -> std::string {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, PointMass>) return "point";
                else if constexpr (std::is_same_v<T, LeftHaarOrbit>) return "left";
                else return "twosided";
            },
            v_);
    }

    /// Expected log|det| of a sample.
    double log_abs_det() const {
        return std::visit(
            [](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, TwoSidedHaarOrbit>) {
                    double s = 0.0;
                    for (Eigen::Index i = 0; i < m.d.size(); ++i) s += std::log(std::abs(m.d[i]));
                    return s;
                } else if constexpr (std::is_same_v<T, PointMass>) {
                    return std::log(std::abs(determinant(m.a)));
                } else {
                    return std::log(std::abs(determinant(m.a0)));
                }
            },
            v_);
    }

private:
    explicit MeasureModel(Variant v) : v_(std::move(v)) {
        std::visit(
            [this](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, TwoSidedHaarOrbit>) {
                    if (m.d.size() < 1 || !m.d.allFinite()) throw Error("model: invalid diagonal");
                    for (Eigen::Index i = 0; i < m.d.size(); ++i)
                        if (!(m.d[i] > 0.0)) throw DegenerateMatrix("model: diagonal must be positive");
                    n_ = m.d.size();
                } else {
                    const Matrix& a = [&]() -> const Matrix& {
                        if constexpr (std::is_same_v<T, PointMass>) return m.a;
                        else return m.a0;
                    }();
                    require_square(a, "model matrix");
                    require_finite(a, "model matrix");
                    if (a.fullPivLu().rank() < a.rows()) throw DegenerateMatrix("model: matrix must be invertible");
                    n_ = a.rows();
                }
            },
            v_);
    }

    Variant v_;
    Eigen::Index n_ = 0;
};

/// One draw from the model.
inline Matrix sample(const MeasureModel& model, RngStream& rng) {
    return std::visit(
        [&](const auto& m) -> Matrix {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return m.a;
            } else if constexpr (std::is_same_v<T, LeftHaarOrbit>) {
                return haar_orthogonal(m.a0.rows(), rng) * m.a0;
            } else {
                const auto n = m.d.size();
                const Matrix u = haar_orthogonal(n, rng);
                const Matrix v = haar_orthogonal(n, rng);
                return u * m.d.asDiagonal() * v;
            }
        },
        model.variant());
}

struct LyapunovEstimate {
    std::vector<double> r;          ///< exponents, largest first
    std::vector<double> std_error;  ///< batch-means standard errors
    std::size_t m = 0;              ///< number of factors

    /// r_1 + ... + r_k and its standard error (batch means of the partial sums).
    Estimate partial_sum(std::size_t k) const {
        if (k == 0 || k > partial_sums.size()) throw Error("partial_sum: k out of range");
        return partial_sums[k - 1];
    }

    std::vector<Estimate> partial_sums;
};

/// Number of batches used for the QR cocycle's standard errors.
inline std::size_t lyapunov_batches(std::size_t m) {
    return std::min<std::size_t>(m, std::clamp<std::size_t>(m / 1000, 20, 100));
}

/// Lyapunov spectrum through the QR cocycle: Q_t R_t = g_t Q_{t-1},
/// r_i = (1/m) sum_t log R_t(i, i). Q is re-orthonormalised every step.
inline LyapunovEstimate lyapunov_spectrum_qr(const MeasureModel& model, std::size_t m, RngStream& rng) {
    if (m < 1) throw Error("lyapunov_spectrum_qr: m must be positive");
    const auto n = model.n();
    Matrix q = Matrix::Identity(n, n);
    std::vector<std::vector<double>> logs(n, std::vector<double>(m));
    for (std::size_t t = 0; t < m; ++t) {
        auto qr = qr_positive(sample(model, rng) * q);
        for (Eigen::Index i = 0; i < n; ++i) logs[i][t] = std::log(qr.R(i, i));
        q = std::move(qr.Q);
    }

    const auto batches = lyapunov_batches(m);
    LyapunovEstimate out;
    out.m = m;
    std::vector<double> running(m, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto e = batch_means(logs[i], batches);
        out.r.push_back(e.value);
        out.std_error.push_back(e.std_error);
        for (std::size_t t = 0; t < m; ++t) running[t] += logs[i][t];
        out.partial_sums.push_back(batch_means(running, batches));
    }
    return out;
}

namespace detail {

inline void require_invariant(const MeasureModel& model, std::size_t k) {
    if (!model.orthogonally_invariant()) throw Error("estimator requires an orthogonally invariant model");
    if (k < 1 || k >= static_cast<std::size_t>(model.n())) throw Error("estimator requires 1 <= k <= n-1");
}

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace detail

/// E_{A ~ model, g ~ Gr(n,k)} log|det A|_g|, which equals r_1 + ... + r_k.
inline Estimate topk_sum_grassmann(const MeasureModel& model, std::size_t k, std::size_t nsamples,
                                   const RngStream& rng, unsigned workers = 1) {
    detail::require_invariant(model, k);
    const auto n = model.n();
    return mc_mean(
        nsamples, rng,
        [&](RngStream& r) {
            const Matrix a = sample(model, r);
            return restriction_log_det(a, haar_subspace(n, static_cast<Eigen::Index>(k), r));
        },
        workers);
}

/// E_g log+|det A|_g| averaged over the model as well (the right-hand side
/// of the Haar-form inequality before the 1/C(n,k) factor).
inline Estimate grassmann_positive_mean(const MeasureModel& model, std::size_t k, std::size_t nsamples,
                                        const RngStream& rng, unsigned workers = 1) {
    detail::require_invariant(model, k);
    const auto n = model.n();
    return mc_mean(
        nsamples, rng,
        [&](RngStream& r) {
            const Matrix a = sample(model, r);
            return detail::positive_part(restriction_log_det(a, haar_subspace(n, static_cast<Eigen::Index>(k), r)));
        },
        workers);
}

/// E (log|lambda_1| + ... + log|lambda_k|)^+.
inline Estimate mean_exponent_lhs(const MeasureModel& model, std::size_t k, std::size_t nsamples,
                                  const RngStream& rng, unsigned workers = 1) {
    if (k < 1 || k > static_cast<std::size_t>(model.n())) throw Error("mean_exponent_lhs: k out of range");
    return mc_mean(
        nsamples, rng,
        [&](RngStream& r) { return detail::positive_part(eig_log_moduli(sample(model, r)).top_sum(k)); },
        workers);
}

struct SupInvariantEstimate {
    Estimate estimate;
    std::size_t rejected = 0;  ///< samples dropped for eigenvalue collisions
    std::size_t accepted = 0;
    /// Pointwise check (top-k sum)^+ >= (best invariant sum)^+ on every
    /// accepted sample; counts the failures (expected 0).
    std::size_t pointwise_violations = 0;

    double rejection_rate() const {
        const auto total = rejected + accepted;
        return total ? static_cast<double>(rejected) / static_cast<double>(total) : 0.0;
    }
    /// More than 0.1% of samples rejected suggests a non-generic model.
    bool flagged() const { return rejection_rate() > 1e-3; }
};

/// E sup_{g : A g = g} log+|det A|_g| with the supremum 0 when no real
/// invariant k-subspace exists. Samples with colliding eigenvalues are
/// rejected and counted.
inline SupInvariantEstimate sup_invariant_lhs(const MeasureModel& model, std::size_t k, std::size_t nsamples,
                                              const RngStream& rng, unsigned workers = 1) {
    if (k < 1 || k > static_cast<std::size_t>(model.n())) throw Error("sup_invariant_lhs: k out of range");
    struct Acc {
        RunningStats stats;
        std::size_t rejected = 0;
        std::size_t violations = 0;
    };
    auto accs = parallel_samples<Acc>(
        nsamples, workers, rng, [] { return Acc{}; },
        [&](RngStream& r, Acc& acc) {
            const Matrix a = sample(model, r);
            detail::SpectrumUnits s;
            try {
                s = detail::spectrum_units(a);
            } catch (const NonGenericSpectrum&) {
                ++acc.rejected;
                return;
            }
            const auto best = detail::topk_from_units(s, k);
            const double sup = best.attained ? detail::positive_part(best.value) : 0.0;
            double top = 0.0;
            for (std::size_t i = 0; i < k; ++i) top += s.log_moduli[i];
            if (!(detail::positive_part(top) >= sup)) ++acc.violations;
            acc.stats.add(sup);
        });
    SupInvariantEstimate out;
    RunningStats total;
    for (const auto& acc : accs) {
        total.merge(acc.stats);
        out.rejected += acc.rejected;
        out.pointwise_violations += acc.violations;
    }
    out.estimate = total.estimate();
    out.accepted = total.count();
    return out;
}

inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    double b = 1.0;
    for (std::size_t i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(b);
}

/// Both sides of E_U sup log+|det UA|_g| >= C(n,k)^{-1} E_g log+|det A|_g|.
struct MainInequality {
    std::size_t n = 0;
    std::size_t k = 0;
    Estimate eigen_lhs;        ///< E (sum_{i<=k} log|lambda_i|)^+
    SupInvariantEstimate sup_lhs;
    Estimate grassmann_mean;   ///< E log+|det A|_g|
    double rhs = 0.0;          ///< grassmann_mean / C(n,k)
    double rhs_std_error = 0.0;

    /// (LHS - RHS) and its combined standard error, LHS = sup form.
    double margin() const { return sup_lhs.estimate.value - rhs; }
    double margin_std_error() const {
        return std::hypot(sup_lhs.estimate.std_error, rhs_std_error);
    }
    /// LHS >= RHS - 3 sigma.
    bool holds() const { return margin() >= -3.0 * margin_std_error(); }
};

inline MainInequality verify_main_inequality(const MeasureModel& model, std::size_t k, std::size_t nsamples,
                                             const RngStream& rng, unsigned workers = 1) {
    detail::require_invariant(model, k);
    MainInequality out;
    out.n = static_cast<std::size_t>(model.n());
    out.k = k;
    out.eigen_lhs = mean_exponent_lhs(model, k, nsamples, rng.substream(0), workers);
    out.sup_lhs = sup_invariant_lhs(model, k, nsamples, rng.substream(1), workers);
    out.grassmann_mean = grassmann_positive_mean(model, k, nsamples, rng.substream(2), workers);
    const double c = binomial(out.n, k);
    out.rhs = out.grassmann_mean.value / c;
    out.rhs_std_error = out.grassmann_mean.std_error / c;
    return out;
}

}  // namespace lyapinv
