#pragma once

// Dense small-matrix numerics shared by the rest of the library: Haar
// sampling on O(n), QR with a positive diagonal, eigenvalue log-moduli and
// the Kronecker operator X -> B2 X B1^{-1}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "rng.hpp"

namespace lyapinv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Diagonals of R below this are treated as rank collapse.
inline constexpr double kDegenerateThreshold = 1e-300;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline const Matrix& require_finite(const Matrix& m, const char* what = "matrix") {
    if (!m.allFinite()) throw Error(std::string(what) + " has non-finite entries");
    return m;
}

inline void require_square(const Matrix& m, const char* what = "matrix") {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw Error(std::string(what) + " must be square and non-empty");
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// QR factorisation M = Q R with R upper triangular and diag(R) > 0.
///
/// For an m x k input with m >= k, Q is the thin m x k factor and R is k x k.
/// Under the positivity constraint the factors are unique.
struct QrResult {
    Matrix Q;
    Matrix R;
};

inline QrResult qr_positive(const Matrix& m) {
    const auto rows = m.rows();
    const auto cols = m.cols();
    if (cols == 0 || rows < cols) throw DegenerateMatrix("qr_positive: matrix cannot have full column rank");

    Eigen::HouseholderQR<Matrix> qr(m);
    QrResult out;
    out.Q = qr.householderQ() * Matrix::Identity(rows, cols);
    out.R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < cols; ++i) {
        const double d = out.R(i, i);
        if (!(std::abs(d) >= kDegenerateThreshold))
            throw DegenerateMatrix("qr_positive: rank-deficient input");
        if (d < 0) {
            out.R.row(i) *= -1.0;
            out.Q.col(i) *= -1.0;
        }
    }
    return out;
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
    Matrix g(rows, cols);
    // Column-major fill so the draw order is fixed independent of Eigen internals.
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
    return g;
}

/// Haar-distributed orthogonal matrix: Q factor of a Gaussian matrix with
/// the signs fixed so that R has a positive diagonal.
inline Matrix haar_orthogonal(Eigen::Index n, RngStream& rng) {
    if (n < 1) throw Error("haar_orthogonal: n must be positive");
    return qr_positive(gaussian_matrix(n, n, rng)).Q;
}

/// U diag(svals) V with U, V Haar.
inline Matrix random_with_singular_values(const Vector& svals, RngStream& rng) {
    const auto n = svals.size();
    const Matrix u = haar_orthogonal(n, rng);
    const Matrix v = haar_orthogonal(n, rng);
    return u * svals.asDiagonal() * v;
}

/// n values log-uniform in [lo, hi].
inline Vector log_uniform(Eigen::Index n, double lo, double hi, RngStream& rng) {
    if (!(lo > 0.0 && hi >= lo)) throw Error("log_uniform: need 0 < lo <= hi");
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
    return s;
}

/// Sorted log|lambda_i(A)|, largest first, with multiplicity.
struct EigenLogModuli {
    std::vector<double> values;

    double sum() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    /// Sum of the k largest values, accumulated in sorted order.
    double top_sum(std::size_t k) const {
        double s = 0.0;
        for (std::size_t i = 0; i < k && i < values.size(); ++i) s += values[i];
        return s;
    }
};

/// Complex eigenvalues of a real square matrix (real Schur form underneath).
inline std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    require_square(a);
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw DegenerateMatrix("eigenvalues: Schur iteration did not converge");
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

inline EigenLogModuli eig_log_moduli(const Matrix& a) {
    const auto ev = eigenvalues(a);
    EigenLogModuli out;
    out.values.reserve(ev.size());
    for (const auto& z : ev) {
        const double r = std::abs(z);
        if (!(r >= kDegenerateThreshold)) throw DegenerateMatrix("eig_log_moduli: singular matrix");
        out.values.push_back(std::log(r));
    }
    std::sort(out.values.begin(), out.values.end(), std::greater<>());
    return out;
}

/// Determinant through LU with partial pivoting.
inline double determinant(const Matrix& a) {
    require_square(a);
    return a.partialPivLu().determinant();
}

inline Matrix inverse_checked(const Matrix& b) {
    require_square(b);
    Eigen::FullPivLU<Matrix> lu(b);
    if (!lu.isInvertible()) throw DegenerateMatrix("matrix is singular");
    return lu.inverse();
}

/// Matrix of X -> B2 X B1^{-1} on (n-k) x k matrices X, in the entry basis
/// ordered row-major (index i*k + j for X(i, j)). Equals B2 (x) B1^{-T}.
inline Matrix kron_operator(const Matrix& b2, const Matrix& b1) {
    require_square(b1, "B1");
    require_square(b2, "B2");
    const Matrix b1inv = inverse_checked(b1);
    const auto k = b1.rows();
    const auto m = b2.rows();
    Matrix out(m * k, m * k);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index p = 0; p < m; ++p)
            for (Eigen::Index j = 0; j < k; ++j)
                for (Eigen::Index q = 0; q < k; ++q) out(i * k + j, p * k + q) = b2(i, p) * b1inv(q, j);
    return out;
}

/// Squared singular values, largest first.
inline std::vector<double> squared_singular_values(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    std::vector<double> out(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = s[i] * s[i];
    return out;
}

}  // namespace lyapinv
