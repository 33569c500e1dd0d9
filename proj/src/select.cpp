#include "mixsel/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "mixsel/errors.hpp"
#include "mixsel/init.hpp"

namespace mixsel {

double bic_value(const MixtureModel& model, const Matrix& data) {
    const double n = static_cast<double>(data.rows());
    const double df = free_params_per_component(model.dim());
    return log_likelihood(model, data) - 0.5 * model.order() * df * std::log(n);
}

namespace {

std::vector<double> log_spaced_grid(double lo, double hi, int n, int free_params, int count);

}  // namespace

std::vector<double> lambda_grid(int n, int m_init, int free_params, int count) {
    const double lo = 0.01 / std::sqrt(static_cast<double>(n));
    const double hi = 0.9 / (static_cast<double>(m_init) * free_params);
    return log_spaced_grid(lo, hi, n, free_params, count);
}

std::vector<double> scad_lambda_grid(int n, int free_params, int count) {
    const double lo = 0.01 / std::sqrt(static_cast<double>(n));
    const double hi = 0.27 / free_params;
    return log_spaced_grid(lo, hi, n, free_params, count);
}

std::vector<double> lambda_grid_for(const PenaltySpec& spec, int n, int m_init, int count) {
    return spec.kind == PenaltyKind::ScadLog
               ? scad_lambda_grid(n, spec.free_params, count)
               : lambda_grid(n, m_init, spec.free_params, count);
}

namespace {

std::vector<double> log_spaced_grid(double lo, double hi, int n, int free_params, int count) {
    if (count < 2) throw EmptyRange("lambda_grid: count must be >= 2");
    if (lo >= hi) {
        throw EmptyRange("lambda_grid: lower bound " + std::to_string(lo) +
                         " >= upper bound " + std::to_string(hi));
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / (count - 1);
    for (int i = 0; i < count; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(log_lo + step * i);
    }
    grid.front() = lo;
    grid.back() = hi;

    // Ensure coverage of the sqrt(log n / n)/D_f scale: if no grid point is
    // within a factor of two, move the nearest one onto it.
    const double target =
        std::clamp(std::sqrt(std::log(static_cast<double>(n)) / n) / free_params, lo, hi);
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double dist = std::abs(std::log(grid[i] / target));
        if (dist < best) {
            best = dist;
            nearest = i;
        }
    }
    if (best > std::log(2.0)) {
        grid[nearest] = target;
        std::sort(grid.begin(), grid.end());
    }
    return grid;
}

}  // namespace

SelectionResult select_lambda(const Matrix& data, int m_init, const PenaltySpec& spec_template,
                              const std::vector<double>& grid, const EMConfig& config, Rng& rng) {
    if (grid.empty()) throw EmptyRange("select_lambda: empty grid");
    std::vector<double> ordered(grid);
    std::sort(ordered.begin(), ordered.end());

    // One shared initialization (same seed across lambda) so BIC differences
    // reflect lambda only; computed once, the fits never mutate it.
    Rng init_rng(rng.next_seed());
    const MixtureModel init = init_from_kmeans(data, m_init, config.cov_floor, init_rng);

    std::vector<LambdaOutcome> per_lambda;
    std::optional<MixtureModel> best_model;
    EMTrace best_trace;
    double best_lambda = 0.0;
    double best_bic = -std::numeric_limits<double>::infinity();

    for (double lambda : ordered) {
        LambdaOutcome outcome;
        outcome.lambda = lambda;
        try {
            const PenaltySpec spec = spec_template.with_lambda(lambda);
            auto [model, trace] = fit_penalized(data, init, spec, config);
            outcome.selected_order = model.order();
            outcome.loglik = log_likelihood(model, data);
            outcome.bic = bic_value(model, data);
            outcome.objective =
                outcome.loglik -
                penalty_term(spec, model.weights(), static_cast<int>(data.rows()));
            outcome.iterations = trace.iterations();
            outcome.converged = trace.converged();
            // ascending grid + ">=" breaks BIC ties toward larger lambda
            if (outcome.bic >= best_bic) {
                best_bic = outcome.bic;
                best_lambda = lambda;
                best_model = std::move(model);
                best_trace = std::move(trace);
            }
        } catch (const std::exception& e) {
            outcome.failed = true;
            outcome.error = e.what();
        }
        per_lambda.push_back(std::move(outcome));
    }
    if (!best_model) {
        throw std::runtime_error("select_lambda: every grid value failed");
    }
    return SelectionResult{best_lambda, std::move(*best_model), std::move(best_trace),
                           std::move(per_lambda)};
}

OrderSearchResult aic_bic_search(const Matrix& data, int m_max, const EMConfig& config,
                                 Rng& rng, OrderCriterion criterion) {
    const double n = static_cast<double>(data.rows());
    const double d = static_cast<double>(data.cols());
    if (m_max > n / d) {
        throw InitTooManyComponents("aic_bic_search: M_max exceeds n/d");
    }
    const int df = free_params_per_component(static_cast<int>(d));
    constexpr int kRestarts = 3;

    std::vector<OrderOutcome> per_order;
    std::optional<MixtureModel> best_model;
    int selected_order = 0;
    double best_score = -std::numeric_limits<double>::infinity();

    for (int m = 1; m <= m_max; ++m) {
        OrderOutcome outcome;
        outcome.order = m;
        std::optional<std::pair<MixtureModel, double>> best_fit;
        for (int r = 0; r < kRestarts; ++r) {
            const std::uint64_t restart_seed = rng.next_seed();
            try {
                Rng restart_rng(restart_seed);
                const MixtureModel init = init_from_kmeans(data, m, config.cov_floor, restart_rng);
                auto fit = fit_standard_em(data, init, config);
                if (!best_fit || fit.second > best_fit->second) best_fit = std::move(fit);
            } catch (const std::exception&) {
                // a degenerate restart is skipped; remaining restarts may succeed
            }
        }
        if (!best_fit) {
            outcome.failed = true;
            per_order.push_back(outcome);
            continue;
        }
        const double k = static_cast<double>(m) * df - 1.0;
        outcome.loglik = best_fit->second;
        outcome.score = criterion == OrderCriterion::AIC
                            ? outcome.loglik - k
                            : outcome.loglik - 0.5 * k * std::log(n);
        per_order.push_back(outcome);
        if (outcome.score > best_score) {
            best_score = outcome.score;
            selected_order = m;
            best_model = std::move(best_fit->first);
        }
    }
    if (!best_model) {
        throw std::runtime_error("aic_bic_search: every order failed");
    }
    return OrderSearchResult{selected_order, std::move(*best_model), std::move(per_order)};
}

void write_selection_csv(const SelectionResult& result, std::ostream& out) {
    out << "lambda,M_hat,BIC,loglik\n";
    out.precision(17);
    for (const LambdaOutcome& o : result.per_lambda) {
        if (o.failed) {
            out << o.lambda << ",failed,,\n";
        } else {
            out << o.lambda << ',' << o.selected_order << ',' << o.bic << ',' << o.loglik << '\n';
        }
    }
}

}  // namespace mixsel
