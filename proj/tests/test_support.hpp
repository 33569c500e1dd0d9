#pragma once

// Shared helpers and independent oracles for the unit suites. Everything here
// deliberately avoids the library's own evaluation path (explicit inverses,
// naive sums) so the tests cross-check rather than echo the implementation.

#include <cmath>
#include <vector>

#include "mixsel/mixture.hpp"
#include "mixsel/rng.hpp"

namespace test_support {

using mixsel::Matrix;
using mixsel::Vector;

inline Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

inline Matrix mat2(double a11, double a12, double a21, double a22) {
    Matrix m(2, 2);
    m << a11, a12, a21, a22;
    return m;
}

inline Matrix random_spd(int d, mixsel::Rng& rng, double jitter = 0.5) {
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
    return a * a.transpose() + jitter * Matrix::Identity(d, d);
}

inline Vector random_simplex(int m, mixsel::Rng& rng) {
    Vector w(m);
    for (int i = 0; i < m; ++i) w[i] = -std::log(1.0 - rng.uniform());
    return w / w.sum();
}

inline mixsel::MixtureModel random_model(int m, int d, mixsel::Rng& rng, double spread = 4.0) {
    std::vector<mixsel::Component> comps;
    for (int k = 0; k < m; ++k) {
        Vector mean(d);
        for (int j = 0; j < d; ++j) mean[j] = spread * rng.normal();
        comps.push_back({mean, random_spd(d, rng)});
    }
    return mixsel::MixtureModel(random_simplex(m, rng), std::move(comps));
}

// density via explicit inverse and determinant; no Cholesky, no log space
inline double direct_log_density(const Vector& x, const Vector& mean, const Matrix& cov) {
    const int d = static_cast<int>(x.size());
    const Matrix inv = cov.inverse();
    const double quad = (x - mean).transpose() * inv * (x - mean);
    return -0.5 * (d * std::log(2.0 * M_PI) + std::log(cov.determinant()) + quad);
}

// per-point naive mixture likelihood, summed without log-sum-exp
inline double naive_log_likelihood(const mixsel::MixtureModel& model, const Matrix& data) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        double density = 0.0;
        for (int k = 0; k < model.order(); ++k) {
            density += model.weights()[k] *
                       std::exp(direct_log_density(data.row(i).transpose(),
                                                   model.component(k).mean,
                                                   model.component(k).cov));
        }
        total += std::log(density);
    }
    return total;
}

// composite Simpson quadrature of f over [a, b]
template <typename F>
double simpson(F f, double a, double b, int intervals) {
    if (intervals % 2 != 0) ++intervals;
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace test_support
