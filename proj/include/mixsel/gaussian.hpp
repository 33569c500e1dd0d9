#pragma once

#include <Eigen/Dense>

#include "mixsel/rng.hpp"

namespace mixsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// True when the matrix is square and symmetric to the given relative
/// tolerance (scaled by the largest absolute entry).
bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

/// Lower-triangular L with cov = L * L^T.
/// Throws NotPositiveDefinite when a pivot is nonpositive; the caller is
/// expected to regularize and retry.
Matrix cholesky(const Matrix& cov);

/// Multivariate normal log-density
///   -0.5 * (d log 2pi + log det cov + (x-mean)^T cov^-1 (x-mean)),
/// evaluated through the Cholesky factor; no explicit inverse or determinant.
double log_density(const Vector& x, const Vector& mean, const Matrix& cov);

/// Cached Cholesky factorization of one Gaussian component, for repeated
/// density evaluation over a data matrix.
class GaussianFactor {
public:
    GaussianFactor(Vector mean, const Matrix& cov);

    double log_density(const Vector& x) const;

    /// Writes log phi(x_i) for every row x_i of data into out (length n).
    void log_density_rows(const Matrix& data, Eigen::Ref<Vector> out) const;

    const Vector& mean() const { return mean_; }
    const Matrix& chol_lower() const { return chol_; }

private:
    Vector mean_;
    Matrix chol_;      // lower triangular
    double log_norm_;  // -0.5 * (d log 2pi + log det cov)
};

/// Eigenvalues of a symmetric matrix, sorted descending.
Vector sym_eigenvalues(const Matrix& cov);

/// Clamps the eigenvalues of a symmetric matrix at `floor` and recomposes,
/// preserving eigenvectors. Input already satisfying the floor is returned
/// unchanged; the operation is idempotent.
Matrix regularize_cov(const Matrix& cov, double floor);

/// Default eigenvalue floor: 1e-6 * trace/d, with an absolute fallback for
/// (near-)zero matrices.
double default_cov_floor(const Matrix& cov);

/// One draw of mean + L * z with z i.i.d. standard normal from rng.
Vector sample_gaussian(const Vector& mean, const Matrix& cov, Rng& rng);

}  // namespace mixsel
