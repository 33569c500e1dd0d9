#pragma once

#include "mixsel/mixture.hpp"

namespace mixsel {

enum class PenaltyKind { LogEps, ScadLog };

/// Parameters of the weight penalty
///   n * lambda * D_f * sum_m [log(eps + g(pi_m)) - log(eps)]
/// with g = identity (LogEps) or g = SCAD (ScadLog).
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::LogEps;
    double lambda = 0.0;
    double epsilon = 1e-6;
    double a = 3.7;
    int free_params = 0;  // D_f, free parameters per component

    static PenaltySpec log_eps(double lambda, int dim);
    static PenaltySpec scad_log(double lambda, int dim);

    /// Copy with a different tuning parameter; used when scanning a grid.
    PenaltySpec with_lambda(double new_lambda) const;

    void validate() const;
};

/// Free parameters of one Gaussian component: 1 + d + d(d+1)/2.
int free_params_per_component(int dim);

/// SCAD penalty value, obtained by integrating its derivative from 0:
///   pi                                        for pi <= lambda,
///   lambda + [a l (pi-l) - (pi^2-l^2)/2]/((a-1) l)  for lambda < pi <= a lambda,
///   lambda (a+1)/2                            for pi > a lambda.
/// Continuous, nondecreasing, constant past a*lambda. Zero when lambda == 0.
double scad(double pi, double lambda, double a);

/// SCAD derivative I(pi <= l) + (a l - pi)_+ / ((a-1) l) * I(pi > l).
double scad_derivative(double pi, double lambda, double a);

/// The penalty term for a weight vector at sample size n. Components with
/// zero weight contribute exactly zero.
double penalty_term(const PenaltySpec& spec, const Vector& weights, int n);

/// log_likelihood(model, data) - penalty_term(spec, model.weights, n).
double penalized_objective(const MixtureModel& model, const Matrix& data,
                           const PenaltySpec& spec);

}  // namespace mixsel
