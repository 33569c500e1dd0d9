#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mixsel/gaussian.hpp"
#include "mixsel/rng.hpp"

namespace mixsel {

struct Component {
    Vector mean;
    Matrix cov;
};

/// Finite Gaussian mixture: weights on the simplex plus one (mean, cov) pair
/// per component. Validated on construction, immutable afterwards.
class MixtureModel {
public:
    MixtureModel(Vector weights, std::vector<Component> components);

    int order() const { return static_cast<int>(components_.size()); }
    int dim() const { return static_cast<int>(components_.front().mean.size()); }
    const Vector& weights() const { return weights_; }
    const std::vector<Component>& components() const { return components_; }
    const Component& component(int m) const { return components_[static_cast<std::size_t>(m)]; }

private:
    Vector weights_;
    std::vector<Component> components_;
};

/// Posterior membership probabilities, one row per observation, one column
/// per component; rows sum to 1.
using Responsibilities = Matrix;

/// Observed-data log-likelihood sum_i log sum_m pi_m phi(x_i), accumulated
/// through log-sum-exp.
double log_likelihood(const MixtureModel& model, const Matrix& data);

/// E-step posteriors h[i][m] = pi_m phi_m(x_i) / sum_k pi_k phi_k(x_i),
/// computed in log space. Throws DegenerateDensity if every component
/// underflows for some observation.
Responsibilities responsibilities(const MixtureModel& model, const Matrix& data);

/// One-pass E-step: responsibilities plus the observed-data log-likelihood of
/// the current model, sharing a single set of Cholesky factorizations.
std::pair<Responsibilities, double> responsibilities_and_loglik(
    const MixtureModel& model, const Matrix& data);

/// Weighted MLE updates: per-component weighted mean and (1/sum h)-normalized
/// weighted covariance, regularized to the eigenvalue floor.
///
/// cov_floor <= 0 selects the per-matrix default floor. min_mass <= 0 selects
/// d+1 effective observations; a column with mass at or below the minimum
/// throws EmptyComponent carrying the offending index.
std::vector<Component> weighted_mle_update(const Matrix& data,
                                           const Responsibilities& resp,
                                           double cov_floor = 0.0,
                                           double min_mass = 0.0);

/// n draws from the mixture: component index by inverse-CDF on the weights,
/// then a Gaussian draw. One row per observation.
Matrix sample_mixture(const MixtureModel& model, int n, Rng& rng);

/// JSON document {dim, weights[], components[{mean[], cov[][]}]}; values
/// round-trip exactly.
std::string model_to_json(const MixtureModel& model);
MixtureModel model_from_json(const std::string& text);
void save_model(const MixtureModel& model, const std::string& path);
MixtureModel load_model(const std::string& path);

}  // namespace mixsel
