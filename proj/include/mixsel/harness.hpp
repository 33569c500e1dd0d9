#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mixsel/select.hpp"
#include "mixsel/simdata.hpp"

namespace mixsel {

enum class Method { LogEps, ScadLog, BaselineAIC, BaselineBIC };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

/// Per-true-component estimate summary over correct-order replications:
/// means and across-replication standard deviations of the matched weight,
/// mean coordinates and covariance eigenvalues (descending).
struct ComponentStats {
    int matched_count = 0;
    double weight_mean = 0.0;
    double weight_std = 0.0;
    Vector mean_mean;
    Vector mean_std;
    Vector eig_mean;
    Vector eig_std;
};

struct ExperimentReport {
    std::string method;
    int replications = 0;
    int true_order = 0;
    std::map<int, int> histogram;  // selected order -> count
    int failures = 0;
    std::vector<std::string> failure_messages;
    std::vector<ComponentStats> matched_stats;  // one per true component
    double elapsed_seconds = 0.0;

    int correct_count() const;
    double accuracy() const;
};

struct HarnessConfig {
    int m_init = 10;
    int grid_count = 20;
    EMConfig em;
    int threads = 1;  // replications run concurrently when > 1
};

/// Runs R end-to-end replications of one method against a ground truth:
/// regenerate data with a child seed, select the order (BIC over the lambda
/// grid for the penalized methods, exhaustive search for the baselines),
/// record the selected order, and accumulate matched parameter statistics
/// whenever the order is correct. Individual replication failures are
/// recorded, not fatal.
ExperimentReport run_replications(const DatasetSpec& spec, Method method, int replications,
                                  const HarnessConfig& config);

/// Assignment of estimated components to true components minimizing
///   sum_m ||mean_hat - mean||^2 + ||eig(cov_hat) - eig(cov)||^2,
/// exact over all permutations (supported up to M = 10). Returns p with
/// p[t] = index of the estimated component matched to true component t.
std::vector<int> match_components(const MixtureModel& estimated, const MixtureModel& truth);

/// Profile of the minimized negative log-likelihood as the first mixing
/// weight is frozen along a grid decreasing toward zero; all other
/// parameters are re-optimized by EM from a fixed initialization.
struct ProfileCurve {
    std::vector<double> pi1;
    std::vector<double> neg_loglik;
    double fit_r2 = 0.0;     // linear fit of neg_loglik vs log(pi1) on [1e-4, 1e-2]
    double fit_slope = 0.0;
};

ProfileCurve profile_weight_curve(const Matrix& data, const std::vector<double>& pi1_grid,
                                  const EMConfig& config);

/// Log-spaced default grid from 0.5 down to 1e-5.
std::vector<double> default_profile_grid(int count = 28);

/// Selection accuracy as a function of sample size; n_list must be
/// increasing.
std::vector<std::pair<int, double>> consistency_trend(const DatasetSpec& base,
                                                      const std::vector<int>& n_list,
                                                      Method method, int replications,
                                                      const HarnessConfig& config);

/// Structured document plus flat tables.
std::string report_to_json(const ExperimentReport& report);
void write_histogram_csv(const ExperimentReport& report, std::ostream& out);
/// Columns match the parameter-estimation tables: weight, mean coordinates,
/// covariance eigenvalues, each cell formatted mean(std).
void write_component_stats_csv(const ExperimentReport& report, std::ostream& out);
void write_profile_csv(const ProfileCurve& curve, std::ostream& out);

}  // namespace mixsel
