#include "mixsel/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace mixsel {

int free_params_per_component(int dim) {
    return 1 + dim + dim * (dim + 1) / 2;
}

PenaltySpec PenaltySpec::log_eps(double lambda, int dim) {
    PenaltySpec spec;
    spec.kind = PenaltyKind::LogEps;
    spec.lambda = lambda;
    spec.free_params = free_params_per_component(dim);
    return spec;
}

PenaltySpec PenaltySpec::scad_log(double lambda, int dim) {
    PenaltySpec spec = log_eps(lambda, dim);
    spec.kind = PenaltyKind::ScadLog;
    return spec;
}

PenaltySpec PenaltySpec::with_lambda(double new_lambda) const {
    PenaltySpec spec = *this;
    spec.lambda = new_lambda;
    return spec;
}

void PenaltySpec::validate() const {
    if (lambda < 0.0) throw std::invalid_argument("PenaltySpec: lambda must be >= 0");
    if (epsilon <= 0.0) throw std::invalid_argument("PenaltySpec: epsilon must be > 0");
    if (a <= 2.0) throw std::invalid_argument("PenaltySpec: a must be > 2");
    if (free_params <= 0) throw std::invalid_argument("PenaltySpec: free_params must be > 0");
}

double scad(double pi, double lambda, double a) {
    if (lambda <= 0.0) return 0.0;
    if (pi <= lambda) return pi;
    if (pi <= a * lambda) {
        return lambda +
               (a * lambda * (pi - lambda) - 0.5 * (pi * pi - lambda * lambda)) /
                   ((a - 1.0) * lambda);
    }
    return lambda * (a + 1.0) / 2.0;
}

double scad_derivative(double pi, double lambda, double a) {
    if (lambda <= 0.0) return 0.0;
    if (pi <= lambda) return 1.0;
    return std::max(a * lambda - pi, 0.0) / ((a - 1.0) * lambda);
}

double penalty_term(const PenaltySpec& spec, const Vector& weights, int n) {
    if (spec.lambda == 0.0) return 0.0;
    double sum = 0.0;
    for (Eigen::Index m = 0; m < weights.size(); ++m) {
        const double g = spec.kind == PenaltyKind::LogEps
                             ? weights[m]
                             : scad(weights[m], spec.lambda, spec.a);
        // log(eps + g) - log(eps) = log1p(g / eps); exactly 0 at g == 0
        sum += std::log1p(g / spec.epsilon);
    }
    return static_cast<double>(n) * spec.lambda * spec.free_params * sum;
}

double penalized_objective(const MixtureModel& model, const Matrix& data,
                           const PenaltySpec& spec) {
    return log_likelihood(model, data) -
           penalty_term(spec, model.weights(), static_cast<int>(data.rows()));
}

}  // namespace mixsel
