#include "mixsel/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "mixsel/errors.hpp"

namespace mixsel {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

bool is_symmetric(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix cholesky(const Matrix& cov) {
    if (!is_symmetric(cov, 1e-10)) {
        throw DimensionMismatch("cholesky: matrix is not symmetric");
    }
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("cholesky: matrix is not positive definite");
    }
    return llt.matrixL();
}

GaussianFactor::GaussianFactor(Vector mean, const Matrix& cov)
    : mean_(std::move(mean)), chol_(cholesky(cov)) {
    const double log_det = 2.0 * chol_.diagonal().array().log().sum();
    log_norm_ = -0.5 * (static_cast<double>(mean_.size()) * kLogTwoPi + log_det);
}

double GaussianFactor::log_density(const Vector& x) const {
    if (x.size() != mean_.size()) {
        throw DimensionMismatch("log_density: dimension mismatch");
    }
    const Vector y = chol_.triangularView<Eigen::Lower>().solve(x - mean_);
    return log_norm_ - 0.5 * y.squaredNorm();
}

void GaussianFactor::log_density_rows(const Matrix& data, Eigen::Ref<Vector> out) const {
    if (data.cols() != mean_.size()) {
        throw DimensionMismatch("log_density_rows: dimension mismatch");
    }
    const Matrix centered = (data.rowwise() - mean_.transpose()).transpose();
    const Matrix y = chol_.triangularView<Eigen::Lower>().solve(centered);
    out = (-0.5 * y.colwise().squaredNorm().array() + log_norm_).transpose();
}

double log_density(const Vector& x, const Vector& mean, const Matrix& cov) {
    return GaussianFactor(mean, cov).log_density(x);
}

namespace {

// closed-form (d <= 3) or iterative symmetric eigendecomposition
Eigen::SelfAdjointEigenSolver<Matrix> solve_sym_eigen(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    if (sym.rows() <= 3) {
        solver.computeDirect(sym);
    } else {
        solver.compute(sym);
    }
    return solver;
}

}  // namespace

Vector sym_eigenvalues(const Matrix& cov) {
    if (!is_symmetric(cov, 1e-8)) {
        throw DimensionMismatch("sym_eigenvalues: matrix is not symmetric");
    }
    return solve_sym_eigen(0.5 * (cov + cov.transpose())).eigenvalues().reverse();
}

Matrix regularize_cov(const Matrix& cov, double floor) {
    const Matrix sym = 0.5 * (cov + cov.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> solver = solve_sym_eigen(sym);
    if (solver.eigenvalues().minCoeff() >= floor) {
        return cov;
    }
    const Vector clamped = solver.eigenvalues().cwiseMax(floor);
    Matrix out = solver.eigenvectors() * clamped.asDiagonal() *
                 solver.eigenvectors().transpose();
    out = 0.5 * (out + out.transpose());
    return out;
}

double default_cov_floor(const Matrix& cov) {
    const double rel = 1e-6 * cov.trace() / static_cast<double>(cov.rows());
    return std::max(rel, 1e-12);
}

Vector sample_gaussian(const Vector& mean, const Matrix& cov, Rng& rng) {
    const Matrix chol = cholesky(cov);
    Vector z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return mean + chol * z;
}

}  // namespace mixsel
