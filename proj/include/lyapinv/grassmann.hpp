#pragma once

// Points of Gr(n, k) as orthonormal n x k frames, restriction determinants,
// the induced chart map at a fixed subspace and its normal Jacobian, and
// enumeration of the real invariant k-subspaces of a matrix with simple
// spectrum.
//
// The second projection of the fixed-subspace manifold has unit normal
// Jacobian, so only the first projection's Jacobian is computed here.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace lyapinv {

/// Orthonormal frame spanning a k-dimensional subspace of R^n, 1 <= k <= n-1.
class SubspaceFrame {
public:
    static constexpr double kOrthonormalTol = 1e-12;

    explicit SubspaceFrame(Matrix frame) : frame_(std::move(frame)) {
        require_finite(frame_, "frame");
        if (k() < 1 || k() >= n()) throw Error("SubspaceFrame: need 1 <= k <= n-1");
        const Matrix gram = frame_.transpose() * frame_;
        if (max_abs(gram - Matrix::Identity(k(), k())) > kOrthonormalTol)
            throw Error("SubspaceFrame: columns are not orthonormal");
    }

    /// Orthonormalises the column span of `spanning` (must have full column rank).
    static SubspaceFrame from_span(const Matrix& spanning) { return SubspaceFrame(qr_positive(spanning).Q); }

    /// span(e_1, ..., e_k) in R^n.
    static SubspaceFrame coordinate(Eigen::Index n, Eigen::Index k) {
        return SubspaceFrame(Matrix::Identity(n, k));
    }

    Eigen::Index n() const { return frame_.rows(); }
    Eigen::Index k() const { return frame_.cols(); }
    const Matrix& frame() const { return frame_; }

    /// Orthonormal frame of the orthogonal complement.
    Matrix complement() const {
        Eigen::HouseholderQR<Matrix> qr(frame_);
        const Matrix full = qr.householderQ() * Matrix::Identity(n(), n());
        return full.rightCols(n() - k());
    }

private:
    Matrix frame_;
};

/// Sample from the O(n)-invariant probability measure on Gr(n, k).
inline SubspaceFrame haar_subspace(Eigen::Index n, Eigen::Index k, RngStream& rng) {
    if (k < 1 || k >= n) throw Error("haar_subspace: need 1 <= k <= n-1");
    return SubspaceFrame(haar_orthogonal(n, rng).leftCols(k));
}

/// log|det A|_g|: log of the k-volume expansion of A from g onto A g.
/// Computed from the triangular factor of A * frame.
inline double restriction_log_det(const Matrix& a, const SubspaceFrame& g) {
    require_square(a, "A");
    if (a.rows() != g.n()) throw Error("restriction_log_det: dimension mismatch");
    Eigen::HouseholderQR<Matrix> qr(a * g.frame());
    const Matrix& r = qr.matrixQR();
    double s = 0.0;
    for (Eigen::Index i = 0; i < g.k(); ++i) {
        const double d = std::abs(r(i, i));
        if (!(d >= kDegenerateThreshold)) throw DegenerateMatrix("restriction_log_det: singular restriction");
        s += std::log(d);
    }
    return s;
}

/// Blocks of B adapted to an invariant subspace g: B1 acts on g, B2 is the
/// map induced on the quotient, written in the complement frame.
struct AdaptedBlocks {
    Matrix b1;
    Matrix b2;
};

inline AdaptedBlocks adapted_blocks(const Matrix& b, const SubspaceFrame& g) {
    require_square(b, "B");
    if (b.rows() != g.n()) throw Error("adapted_blocks: dimension mismatch");
    const Matrix& f = g.frame();
    const Matrix c = g.complement();
    const Matrix leak = c.transpose() * b * f;
    if (max_abs(leak) > 1e-8 * max_abs(b)) throw NotInvariant("subspace is not invariant under B");
    return {f.transpose() * b * f, c.transpose() * b * c};
}

/// Derivative at g of the chart map induced by B on Gr(n, k), i.e. the
/// k(n-k)-square matrix of phi -> B2 phi B1^{-1}.
inline Matrix induced_chart_derivative(const Matrix& b, const SubspaceFrame& g) {
    const auto blocks = adapted_blocks(b, g);
    return kron_operator(blocks.b2, blocks.b1);
}

/// det(Id - B2 (x) B1^{-T}), signed. The normal Jacobian of the first
/// projection is its absolute value.
inline double normal_jacobian_pi1(const Matrix& b1, const Matrix& b2) {
    const Matrix op = kron_operator(b2, b1);
    return determinant(Matrix::Identity(op.rows(), op.cols()) - op);
}

/// Best log-volume over real invariant k-subspaces.
///
/// `attained` is false when no invariant k-subspace exists, in which case
/// `value` is 0. `witness` lists indices into the sorted spectrum (as in
/// eig_log_moduli) of the chosen eigenvalues.
struct TopSumResult {
    double value = 0.0;
    bool attained = false;
    std::vector<std::size_t> witness;
};

namespace detail {

/// Spectrum sorted by decreasing modulus, grouped into conjugation-closed
/// units: one real eigenvalue or one complex-conjugate pair.
struct SpectrumUnits {
    std::vector<double> log_moduli;               // sorted, largest first
    std::vector<std::vector<std::size_t>> units;  // indices into log_moduli
};

inline constexpr double kCollisionTol = 1e-8;

inline SpectrumUnits spectrum_units(const Matrix& b) {
    const auto ev = eigenvalues(b);
    const std::size_t n = ev.size();
    double radius = 0.0;
    for (const auto& z : ev) radius = std::max(radius, std::abs(z));
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(ev[i]) >= kDegenerateThreshold)) throw DegenerateMatrix("singular matrix");
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(ev[i] - ev[j]) <= kCollisionTol * radius)
                throw NonGenericSpectrum("eigenvalues collide within tolerance");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(std::abs(ev[i]));
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto c) { return logs[a] > logs[c]; });
    std::vector<std::size_t> rank(n);
    SpectrumUnits out;
    out.log_moduli.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        rank[order[r]] = r;
        out.log_moduli[r] = logs[order[r]];
    }

    // The real Schur solver returns conjugate pairs adjacently with exactly
    // opposite imaginary parts and real eigenvalues with zero imaginary part.
    for (std::size_t i = 0; i < n; ++i) {
        if (ev[i].imag() == 0.0) {
            out.units.push_back({rank[i]});
        } else if (ev[i].imag() > 0.0) {
            std::size_t partner = n;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && ev[j] == std::conj(ev[i])) partner = j;
            if (partner == n) throw NonGenericSpectrum("unpaired complex eigenvalue");
            auto lo = std::min(rank[i], rank[partner]);
            auto hi = std::max(rank[i], rank[partner]);
            out.units.push_back({lo, hi});
        }
    }
    return out;
}

template <class Visit>
void for_each_closed_subset(const SpectrumUnits& s, std::size_t k, Visit visit) {
    std::vector<std::size_t> chosen;
    auto rec = [&](auto&& self, std::size_t unit, std::size_t size) -> void {
        if (size == k) {
            visit(chosen);
            return;
        }
        if (unit == s.units.size()) return;
        const auto& u = s.units[unit];
        if (size + u.size() <= k) {
            chosen.push_back(unit);
            self(self, unit + 1, size + u.size());
            chosen.pop_back();
        }
        self(self, unit + 1, size);
    };
    rec(rec, 0, 0);
}

/// Sum of the selected log-moduli, accumulated in sorted order so that the
/// result never exceeds the same-size prefix sum of the sorted list.
inline double ordered_sum(const std::vector<double>& sorted, std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    double s = 0.0;
    for (auto i : idx) s += sorted[i];
    return s;
}

inline std::vector<std::size_t> gather(const SpectrumUnits& s, const std::vector<std::size_t>& units) {
    std::vector<std::size_t> idx;
    for (auto u : units) idx.insert(idx.end(), s.units[u].begin(), s.units[u].end());
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline TopSumResult topk_from_units(const SpectrumUnits& s, std::size_t k) {
    TopSumResult best;
    for_each_closed_subset(s, k, [&](const std::vector<std::size_t>& units) {
        auto idx = gather(s, units);
        const double v = ordered_sum(s.log_moduli, idx);
        if (!best.attained || v > best.value) {
            best.value = v;
            best.attained = true;
            best.witness = std::move(idx);
        }
    });
    return best;
}

}  // namespace detail

/// Maximum of sum log|lambda| over conjugation-closed eigenvalue subsets of
/// size k. For B with simple spectrum these subsets are in bijection with
/// the real B-invariant k-subspaces, and the sum is log|det B|_g|.
inline TopSumResult invariant_topk_sum(const Matrix& b, std::size_t k) {
    require_square(b, "B");
    if (k > static_cast<std::size_t>(b.rows())) throw Error("invariant_topk_sum: k exceeds n");
    return detail::topk_from_units(detail::spectrum_units(b), k);
}

/// Number of real B-invariant k-subspaces of a matrix with simple spectrum.
inline std::uint64_t count_invariant_subspaces(const Matrix& b, std::size_t k) {
    require_square(b, "B");
    if (k > static_cast<std::size_t>(b.rows())) throw Error("count_invariant_subspaces: k exceeds n");
    const auto s = detail::spectrum_units(b);
    std::uint64_t count = 0;
    detail::for_each_closed_subset(s, k, [&](const auto&) { ++count; });
    return count;
}

}  // namespace lyapinv
