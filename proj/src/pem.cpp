#include "mixsel/pem.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "mixsel/errors.hpp"

namespace mixsel {

int EMTrace::total_pruned() const {
    int n = 0;
    for (const EMTraceRow& row : rows) n += static_cast<int>(row.pruned.size());
    return n;
}

void write_trace_csv(const EMTrace& trace, std::ostream& out) {
    out << "iteration,M,objective,loglik,pruned_count\n";
    out.precision(17);
    for (const EMTraceRow& row : trace.rows) {
        out << row.iteration << ',' << row.live_components << ',' << row.objective
            << ',' << row.loglik << ',' << row.pruned.size() << '\n';
    }
}

Vector update_weights_logeps(const Vector& h_col_means, double lambda, int free_params,
                             int live_components) {
    const double shift = lambda * free_params;
    const double denom = 1.0 - live_components * shift;
    if (denom <= 0.0) {
        throw LambdaTooLarge("update_weights_logeps: M*lambda*D_f = " +
                             std::to_string(live_components * shift) + " >= 1");
    }
    Vector w = ((h_col_means.array() - shift) / denom).cwiseMax(0.0);
    if ((w.array() == 0.0).any()) {
        w /= w.sum();  // sum > 0: the pre-clamp values sum to exactly 1
    }
    return w;
}

Vector update_weights_scad(const Vector& h_col_sums, const Vector& prev_weights,
                           double lambda, int free_params, double epsilon, double a,
                           int n, double prune_threshold) {
    if (h_col_sums.size() != prev_weights.size()) {
        throw DimensionMismatch("update_weights_scad: size mismatch");
    }
    const Eigen::Index m_count = prev_weights.size();
    const double nld = static_cast<double>(n) * lambda * free_params;

    // c_k = p'(pi0_k) / (eps + p(pi0_k)), shared across all T_m via sum_k c_k pi0_k
    Vector c(m_count);
    for (Eigen::Index k = 0; k < m_count; ++k) {
        c[k] = scad_derivative(prev_weights[k], lambda, a) /
               (epsilon + scad(prev_weights[k], lambda, a));
    }
    const double weighted_sum = c.dot(prev_weights);

    Vector w(m_count);
    for (Eigen::Index m = 0; m < m_count; ++m) {
        const double t_m = n - nld * weighted_sum + nld * c[m];
        if (t_m <= 0.0) {
            throw NonpositiveDenominator("update_weights_scad: T_" + std::to_string(m) +
                                         " = " + std::to_string(t_m));
        }
        w[m] = h_col_sums[m] / t_m;
    }
    w /= w.sum();  // the linearized update is only first-order simplex-preserving

    if ((w.array() < prune_threshold).any()) {
        w = (w.array() < prune_threshold).select(0.0, w);
        const double sum = w.sum();
        if (sum <= 0.0) {
            throw AllComponentsPruned("update_weights_scad: threshold removed all weights");
        }
        w /= sum;
    }
    return w;
}

MixtureModel prune(const MixtureModel& model, double threshold) {
    std::vector<int> keep;
    for (int m = 0; m < model.order(); ++m) {
        const double w = model.weights()[m];
        if (w > 0.0 && w >= threshold) keep.push_back(m);
    }
    if (keep.empty()) {
        throw AllComponentsPruned("prune: no component has weight >= " +
                                  std::to_string(threshold));
    }
    if (static_cast<int>(keep.size()) == model.order()) return model;
    Vector weights(keep.size());
    std::vector<Component> components;
    components.reserve(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        weights[static_cast<Eigen::Index>(j)] = model.weights()[keep[j]];
        components.push_back(model.component(keep[j]));
    }
    weights /= weights.sum();
    return MixtureModel(std::move(weights), std::move(components));
}

namespace {

// Recovery path for states where the first-order multiplier estimate behind
// T_m turns nonpositive: solve the same linearized M-step stationarity
//   pi_m = S_m / (beta + n lambda D_f c_m),  sum_m pi_m = 1
// for the multiplier beta exactly (the left side is monotone in beta, so a
// unique valid root exists whenever some S_m > 0).
Vector scad_weights_exact_multiplier(const Vector& h_col_sums, const Vector& prev_weights,
                                     double lambda, int free_params, double epsilon,
                                     double a, int n, double prune_threshold) {
    const Eigen::Index m_count = prev_weights.size();
    Vector shift(m_count);  // n lambda D_f c_m
    const double nld = static_cast<double>(n) * lambda * free_params;
    for (Eigen::Index k = 0; k < m_count; ++k) {
        shift[k] = nld * scad_derivative(prev_weights[k], lambda, a) /
                   (epsilon + scad(prev_weights[k], lambda, a));
    }
    const auto simplex_excess = [&](double beta) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < m_count; ++k) s += h_col_sums[k] / (beta + shift[k]);
        return s - 1.0;
    };
    double lo = -shift.minCoeff();
    double hi = std::max(static_cast<double>(n), lo + 1.0);
    while (simplex_excess(hi) > 0.0) hi = lo + 2.0 * (hi - lo);
    // bisection from just above the pole down to the root
    double lo_open = lo + 1e-12 * std::max(1.0, std::abs(lo));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo_open + hi);
        if (simplex_excess(mid) > 0.0) {
            lo_open = mid;
        } else {
            hi = mid;
        }
        if (hi - lo_open <= 1e-14 * std::max(1.0, std::abs(hi))) break;
    }
    const double beta = hi;
    Vector w(m_count);
    for (Eigen::Index k = 0; k < m_count; ++k) w[k] = h_col_sums[k] / (beta + shift[k]);
    w = w.cwiseMax(0.0);
    w /= w.sum();
    if ((w.array() < prune_threshold).any()) {
        w = (w.array() < prune_threshold).select(0.0, w);
        const double sum = w.sum();
        if (sum <= 0.0) {
            throw AllComponentsPruned("scad weight update: threshold removed all weights");
        }
        w /= sum;
    }
    return w;
}

void check_init_order(const Matrix& data, const MixtureModel& init) {
    const double n = static_cast<double>(data.rows());
    const double d = static_cast<double>(data.cols());
    if (init.order() > n / d) {
        throw InitTooManyComponents("initial order " + std::to_string(init.order()) +
                                    " exceeds n/d = " + std::to_string(n / d));
    }
}

double min_mass_of(const EMConfig& config, int dim) {
    return config.min_component_mass > 0.0 ? config.min_component_mass
                                           : static_cast<double>(dim + 1);
}

}  // namespace

std::pair<MixtureModel, EMTrace> fit_penalized(const Matrix& data,
                                               const MixtureModel& init,
                                               const PenaltySpec& spec,
                                               const EMConfig& config) {
    spec.validate();
    check_init_order(data, init);
    const int n = static_cast<int>(data.rows());
    const double min_mass = min_mass_of(config, init.dim());

    MixtureModel model = init;
    EMTrace trace;
    auto [resp, init_loglik] = responsibilities_and_loglik(model, data);
    double prev_objective = init_loglik - penalty_term(spec, model.weights(), n);

    for (int iter = 1; iter <= config.max_iter; ++iter) {
        const int m_live = model.order();

        EMTraceRow row;
        row.iteration = iter;

        // Penalized weight update (Eq-specific), then pruning.
        Vector weights;
        if (spec.kind == PenaltyKind::LogEps) {
            const Vector col_means = resp.colwise().mean();
            weights = update_weights_logeps(col_means, spec.lambda, spec.free_params, m_live);
            row.clamped = static_cast<int>((weights.array() == 0.0).count());
        } else {
            const Vector col_sums = resp.colwise().sum();
            try {
                weights = update_weights_scad(col_sums, model.weights(), spec.lambda,
                                              spec.free_params, spec.epsilon, spec.a, n,
                                              config.prune_threshold);
            } catch (const NonpositiveDenominator&) {
                // the first-order multiplier underestimate is invalid here;
                // solve the same stationarity system with the exact multiplier
                weights = scad_weights_exact_multiplier(col_sums, model.weights(), spec.lambda,
                                                        spec.free_params, spec.epsilon, spec.a,
                                                        n, config.prune_threshold);
            }
        }

        // A component is kept when its weight survives the threshold and it
        // retains enough responsibility mass to estimate a covariance.
        std::vector<int> keep;
        for (int m = 0; m < m_live; ++m) {
            const double w = weights[m];
            const bool weight_ok = w > 0.0 && w >= config.prune_threshold;
            const bool mass_ok = resp.col(m).sum() > min_mass;
            if (weight_ok && mass_ok) {
                keep.push_back(m);
            } else {
                row.pruned.push_back(m);
            }
        }
        if (keep.empty()) {
            throw AllComponentsPruned("fit_penalized: every component extinguished at iteration " +
                                      std::to_string(iter));
        }

        Vector kept_weights(keep.size());
        Responsibilities kept_resp(resp.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            kept_weights[static_cast<Eigen::Index>(j)] = weights[keep[j]];
            kept_resp.col(static_cast<Eigen::Index>(j)) = resp.col(keep[j]);
        }
        kept_weights /= kept_weights.sum();

        std::vector<Component> components =
            weighted_mle_update(data, kept_resp, config.cov_floor, min_mass);
        model = MixtureModel(std::move(kept_weights), std::move(components));

        // One E-step pass evaluates the updated model and feeds the next
        // iteration's weight update.
        auto [next_resp, loglik] = responsibilities_and_loglik(model, data);
        resp = std::move(next_resp);
        const double objective = loglik - penalty_term(spec, model.weights(), n);

        row.live_components = model.order();
        row.objective = objective;
        row.loglik = loglik;
        row.objective_decreased = objective < prev_objective - 1e-7;
        trace.rows.push_back(row);

        const bool pruned_this_iter = !row.pruned.empty();
        const double denom = std::max(std::abs(prev_objective), 1.0);
        if (!pruned_this_iter && std::abs(objective - prev_objective) < config.rel_tol * denom) {
            trace.termination = Termination::Converged;
            prev_objective = objective;
            break;
        }
        prev_objective = objective;
    }
    return {std::move(model), std::move(trace)};
}

std::pair<MixtureModel, double> fit_standard_em(const Matrix& data,
                                                const MixtureModel& init,
                                                const EMConfig& config) {
    check_init_order(data, init);
    const double min_mass = min_mass_of(config, init.dim());

    MixtureModel model = init;
    auto [resp, loglik] = responsibilities_and_loglik(model, data);
    double prev = -std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        const Vector weights = resp.colwise().mean();
        std::vector<Component> components =
            weighted_mle_update(data, resp, config.cov_floor, min_mass);
        model = MixtureModel(weights, std::move(components));

        auto [next_resp, next_loglik] = responsibilities_and_loglik(model, data);
        resp = std::move(next_resp);
        prev = loglik;
        loglik = next_loglik;
        if (std::abs(loglik - prev) < config.rel_tol * std::max(std::abs(prev), 1.0)) break;
    }
    return {std::move(model), loglik};
}

}  // namespace mixsel
