#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mixsel/pem.hpp"
#include "mixsel/rng.hpp"

namespace mixsel {

/// Outcome of one grid point; failed fits are kept for reporting but
/// excluded from the argmax.
struct LambdaOutcome {
    double lambda = 0.0;
    int selected_order = 0;
    double bic = 0.0;
    double loglik = 0.0;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct SelectionResult {
    double best_lambda = 0.0;
    MixtureModel best_model;
    EMTrace best_trace;
    std::vector<LambdaOutcome> per_lambda;
};

/// BIC value of a fitted mixture: loglik - 1/2 * M * D_f * log n.
double bic_value(const MixtureModel& model, const Matrix& data);

/// Logarithmically spaced tuning grid on [0.01/sqrt(n), 0.9/(M_init * D_f)];
/// the upper bound keeps the closed-form log-epsilon weight update valid
/// (denominator 1 - M lambda D_f > 0) from the first iteration. The grid
/// always contains a point within a factor of two of sqrt(log n / n)/D_f
/// (clamped into the range); the nearest grid point is replaced when
/// necessary. Throws EmptyRange when the bounds cross.
std::vector<double> lambda_grid(int n, int m_init, int free_params, int count);

/// Grid for the SCAD-composed penalty. Its update is valid whenever every
/// T_m > 0, a state-dependent condition that select_lambda already guards by
/// excluding failed fits, so the range is not tied to the initial component
/// count; the upper bound 0.45/D_f puts the penalty's kill zone a*lambda well
/// above the weight of a stalled duplicate component, which the flat-past-
/// a*lambda penalty could otherwise never remove.
std::vector<double> scad_lambda_grid(int n, int free_params, int count);

/// Grid appropriate for the penalty kind of the given spec.
std::vector<double> lambda_grid_for(const PenaltySpec& spec, int n, int m_init, int count);

/// Fits the penalized model at every grid value from a shared k-means
/// initialization (same seed across lambda) and returns the BIC argmax,
/// ties broken toward larger lambda.
SelectionResult select_lambda(const Matrix& data, int m_init, const PenaltySpec& spec_template,
                              const std::vector<double>& grid, const EMConfig& config, Rng& rng);

enum class OrderCriterion { AIC, BIC };

struct OrderOutcome {
    int order = 0;
    double loglik = 0.0;
    double score = 0.0;
    bool failed = false;
};

struct OrderSearchResult {
    int selected_order = 0;
    MixtureModel model;
    std::vector<OrderOutcome> per_order;
};

/// Exhaustive-order baseline: standard EM for M = 1..M_max (best of three
/// k-means restarts each), scored with AIC = loglik - k or
/// BIC = loglik - k/2 * log n, where k = M * D_f - 1.
OrderSearchResult aic_bic_search(const Matrix& data, int m_max, const EMConfig& config,
                                 Rng& rng, OrderCriterion criterion);

/// Flat comma-separated export: lambda, M_hat, BIC, loglik.
void write_selection_csv(const SelectionResult& result, std::ostream& out);

}  // namespace mixsel
