#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "mixsel/mixture.hpp"
#include "mixsel/penalty.hpp"

namespace mixsel {

struct EMConfig {
    int max_iter = 2000;
    double rel_tol = 1e-8;           // relative change of the tracked objective
    double prune_threshold = 1e-4;   // weights below this are deleted
    double cov_floor = 0.0;          // <= 0: per-matrix default (1e-6 * trace/d)
    double min_component_mass = 0.0; // <= 0: d+1 effective observations
};

struct EMTraceRow {
    int iteration = 0;
    int live_components = 0;
    double objective = 0.0;  // penalized objective after the iteration
    double loglik = 0.0;
    std::vector<int> pruned;     // indices (pre-prune positions) deleted this iteration
    int clamped = 0;             // weights clamped to zero by the update formula
    bool objective_decreased = false;
};

enum class Termination { Converged, MaxIterations };

struct EMTrace {
    std::vector<EMTraceRow> rows;
    Termination termination = Termination::MaxIterations;

    bool converged() const { return termination == Termination::Converged; }
    int iterations() const { return static_cast<int>(rows.size()); }
    int total_pruned() const;
};

/// Flat comma-separated export: iteration, M, objective, loglik, pruned_count.
void write_trace_csv(const EMTrace& trace, std::ostream& out);

/// Closed-form penalized weight update for the log-epsilon penalty:
///   pi_m = max{0, [h_col_means_m - lambda D_f] / (1 - M lambda D_f)}.
/// If any entry clamps to zero the surviving weights are renormalized.
/// Throws LambdaTooLarge when M * lambda * D_f >= 1.
Vector update_weights_logeps(const Vector& h_col_means, double lambda, int free_params,
                             int live_components);

/// Linearized penalized weight update for the SCAD-composed penalty:
///   pi_m = sum_i h_im / T_m,
///   T_m  = n - n lambda D_f sum_k c_k pi0_k + n lambda D_f c_m,
///   c_k  = p'(pi0_k) / (eps + p(pi0_k)),
/// renormalized to the simplex; entries below prune_threshold are then zeroed
/// and the rest renormalized again. Throws NonpositiveDenominator when any
/// T_m <= 0.
Vector update_weights_scad(const Vector& h_col_sums, const Vector& prev_weights,
                           double lambda, int free_params, double epsilon, double a,
                           int n, double prune_threshold = 1e-4);

/// Deletes components with weight below the threshold (exact zeros always)
/// and renormalizes the survivors. Throws AllComponentsPruned if nothing
/// would remain.
MixtureModel prune(const MixtureModel& model, double threshold);

/// The modified EM algorithm: E-step posteriors, penalized weight update for
/// the chosen penalty, pruning of extinguished components, then standard
/// weighted mean/covariance updates for the survivors. Stops when the
/// relative change of the penalized objective drops below rel_tol on a
/// prune-free iteration, or at max_iter.
std::pair<MixtureModel, EMTrace> fit_penalized(const Matrix& data,
                                               const MixtureModel& init,
                                               const PenaltySpec& spec,
                                               const EMConfig& config);

/// Classical EM at fixed order; returns the model and its final
/// log-likelihood. The log-likelihood is nondecreasing across iterations.
std::pair<MixtureModel, double> fit_standard_em(const Matrix& data,
                                                const MixtureModel& init,
                                                const EMConfig& config);

}  // namespace mixsel
