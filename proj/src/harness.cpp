#include "mixsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mixsel/errors.hpp"
#include "mixsel/init.hpp"

namespace mixsel {

std::string method_name(Method method) {
    switch (method) {
        case Method::LogEps: return "logeps";
        case Method::ScadLog: return "scad";
        case Method::BaselineAIC: return "aic";
        case Method::BaselineBIC: return "bic";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "logeps") return Method::LogEps;
    if (name == "scad") return Method::ScadLog;
    if (name == "aic") return Method::BaselineAIC;
    if (name == "bic") return Method::BaselineBIC;
    throw std::invalid_argument("unknown method '" + name + "'");
}

int ExperimentReport::correct_count() const {
    const auto it = histogram.find(true_order);
    return it == histogram.end() ? 0 : it->second;
}

double ExperimentReport::accuracy() const {
    return replications > 0 ? static_cast<double>(correct_count()) / replications : 0.0;
}

std::vector<int> match_components(const MixtureModel& estimated, const MixtureModel& truth) {
    const int m = truth.order();
    if (estimated.order() != m) {
        throw CountMismatch("match_components: " + std::to_string(estimated.order()) +
                            " estimated vs " + std::to_string(m) + " true components");
    }
    if (m > 10) {
        throw std::invalid_argument("match_components: exact assignment supported up to M = 10");
    }

    Matrix cost(m, m);
    for (int e = 0; e < m; ++e) {
        const Vector eig_e = sym_eigenvalues(estimated.component(e).cov);
        for (int t = 0; t < m; ++t) {
            const Vector eig_t = sym_eigenvalues(truth.component(t).cov);
            cost(e, t) = (estimated.component(e).mean - truth.component(t).mean).squaredNorm() +
                         (eig_e - eig_t).squaredNorm();
        }
    }

    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int t = 0; t < m; ++t) total += cost(perm[static_cast<std::size_t>(t)], t);
        if (total < best_cost) {
            best_cost = total;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

namespace {

struct RepOutcome {
    int selected_order = -1;
    bool failed = false;
    std::string error;
    bool matched = false;
    // matched per-true-component samples
    std::vector<double> weight;
    std::vector<Vector> mean;
    std::vector<Vector> eig;
};

RepOutcome run_one_replication(const DatasetSpec& spec, Method method,
                               const HarnessConfig& config, int rep_index) {
    RepOutcome out;
    try {
        const std::uint64_t rep_seed = Rng::child_seed(spec.seed, static_cast<std::uint64_t>(rep_index));
        DatasetSpec rep_spec = spec;
        rep_spec.seed = Rng::child_seed(rep_seed, 0);
        const Matrix data = generate(rep_spec);
        Rng algo_rng(Rng::child_seed(rep_seed, 1));

        MixtureModel estimated = spec.truth;  // placeholder, overwritten below
        if (method == Method::LogEps || method == Method::ScadLog) {
            PenaltySpec tmpl = method == Method::LogEps
                                   ? PenaltySpec::log_eps(0.0, static_cast<int>(data.cols()))
                                   : PenaltySpec::scad_log(0.0, static_cast<int>(data.cols()));
            // The SCAD outcome is less regular in lambda (the penalty is flat
            // past a*lambda), so its wider range gets a denser sweep.
            const int count = method == Method::ScadLog ? 3 * config.grid_count
                                                        : config.grid_count;
            const std::vector<double> grid = lambda_grid_for(tmpl, spec.n, config.m_init, count);
            SelectionResult sel =
                select_lambda(data, config.m_init, tmpl, grid, config.em, algo_rng);
            estimated = std::move(sel.best_model);
        } else {
            const OrderCriterion crit = method == Method::BaselineAIC ? OrderCriterion::AIC
                                                                      : OrderCriterion::BIC;
            OrderSearchResult res = aic_bic_search(data, config.m_init, config.em, algo_rng, crit);
            estimated = std::move(res.model);
        }

        out.selected_order = estimated.order();
        if (estimated.order() == spec.truth.order()) {
            const std::vector<int> perm = match_components(estimated, spec.truth);
            out.matched = true;
            for (int t = 0; t < spec.truth.order(); ++t) {
                const int e = perm[static_cast<std::size_t>(t)];
                out.weight.push_back(estimated.weights()[e]);
                out.mean.push_back(estimated.component(e).mean);
                out.eig.push_back(sym_eigenvalues(estimated.component(e).cov));
            }
        }
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

// mean and (n-1)-normalized standard deviation of a sample
std::pair<double, double> mean_std(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    if (xs.empty()) return {0.0, 0.0};
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

ExperimentReport run_replications(const DatasetSpec& spec, Method method, int replications,
                                  const HarnessConfig& config) {
    if (replications < 1) throw std::invalid_argument("run_replications: R must be >= 1");
    const auto start = std::chrono::steady_clock::now();

    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(replications));
    const int workers = std::max(1, std::min(config.threads, replications));
    if (workers == 1) {
        for (int r = 0; r < replications; ++r) {
            outcomes[static_cast<std::size_t>(r)] = run_one_replication(spec, method, config, r + 1);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const int r = next.fetch_add(1);
                    if (r >= replications) break;
                    outcomes[static_cast<std::size_t>(r)] =
                        run_one_replication(spec, method, config, r + 1);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    ExperimentReport report;
    report.method = method_name(method);
    report.replications = replications;
    report.true_order = spec.truth.order();

    const int d = spec.truth.dim();
    const int q = spec.truth.order();
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(q));
    std::vector<std::vector<std::vector<double>>> means(
        static_cast<std::size_t>(q), std::vector<std::vector<double>>(static_cast<std::size_t>(d)));
    std::vector<std::vector<std::vector<double>>> eigs(
        static_cast<std::size_t>(q), std::vector<std::vector<double>>(static_cast<std::size_t>(d)));

    for (const RepOutcome& out : outcomes) {
        if (out.failed) {
            ++report.failures;
            report.failure_messages.push_back(out.error);
            continue;
        }
        ++report.histogram[out.selected_order];
        if (!out.matched) continue;
        for (int t = 0; t < q; ++t) {
            weights[static_cast<std::size_t>(t)].push_back(out.weight[static_cast<std::size_t>(t)]);
            for (int j = 0; j < d; ++j) {
                means[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)].push_back(
                    out.mean[static_cast<std::size_t>(t)][j]);
                eigs[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)].push_back(
                    out.eig[static_cast<std::size_t>(t)][j]);
            }
        }
    }

    for (int t = 0; t < q; ++t) {
        ComponentStats stats;
        stats.matched_count = static_cast<int>(weights[static_cast<std::size_t>(t)].size());
        std::tie(stats.weight_mean, stats.weight_std) = mean_std(weights[static_cast<std::size_t>(t)]);
        stats.mean_mean.resize(d);
        stats.mean_std.resize(d);
        stats.eig_mean.resize(d);
        stats.eig_std.resize(d);
        for (int j = 0; j < d; ++j) {
            std::tie(stats.mean_mean[j], stats.mean_std[j]) =
                mean_std(means[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)]);
            std::tie(stats.eig_mean[j], stats.eig_std[j]) =
                mean_std(eigs[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)]);
        }
        report.matched_stats.push_back(std::move(stats));
    }

    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

namespace {

// least squares y = a + b x; returns (slope, r2)
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) return {0.0, 0.0};
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return {0.0, 0.0};
    const double slope = sxy / sxx;
    const double r2 = (sxy * sxy) / (sxx * syy);
    return {slope, r2};
}

}  // namespace

std::vector<double> default_profile_grid(int count) {
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double log_hi = std::log(0.5);
    const double log_lo = std::log(1e-5);
    for (int i = 0; i < count; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(log_hi + (log_lo - log_hi) * i / (count - 1));
    }
    return grid;
}

ProfileCurve profile_weight_curve(const Matrix& data, const std::vector<double>& pi1_grid,
                                  const EMConfig& config) {
    for (double p : pi1_grid) {
        if (!(p > 0.0 && p <= 0.5)) {
            throw std::invalid_argument("profile_weight_curve: pi1 must lie in (0, 0.5]");
        }
    }

    // Condition-P2 style absolute eigenvalue floor: keeps the frozen-weight
    // fits away from single-point degeneracies while leaving room for the
    // spurious component to sharpen.
    EMConfig profile_config = config;
    if (profile_config.cov_floor <= 0.0) {
        const Vector mean = data.colwise().mean();
        const double avg_var =
            (data.rowwise() - mean.transpose()).squaredNorm() /
            (static_cast<double>(data.rows()) * static_cast<double>(data.cols()));
        profile_config.cov_floor = 1e-3 * avg_var;
    }

    // Fixed two-component initialization shared by every grid point.
    Rng init_rng(0x9E3779B97F4A7C15ULL);
    const MixtureModel base = init_from_kmeans(data, 2, profile_config.cov_floor, init_rng);

    ProfileCurve curve;
    for (double pi1 : pi1_grid) {
        Vector weights(2);
        weights << pi1, 1.0 - pi1;
        MixtureModel model(weights, base.components());
        auto [resp, loglik] = responsibilities_and_loglik(model, data);
        for (int iter = 0; iter < profile_config.max_iter; ++iter) {
            std::vector<Component> comps =
                weighted_mle_update(data, resp, profile_config.cov_floor, 1e-12);
            model = MixtureModel(weights, std::move(comps));
            auto [next_resp, next_loglik] = responsibilities_and_loglik(model, data);
            resp = std::move(next_resp);
            const bool done = std::abs(next_loglik - loglik) <
                              profile_config.rel_tol * std::max(std::abs(loglik), 1.0);
            loglik = next_loglik;
            if (done) break;
        }
        curve.pi1.push_back(pi1);
        curve.neg_loglik.push_back(-loglik);
    }

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.pi1.size(); ++i) {
        if (curve.pi1[i] >= 1e-4 && curve.pi1[i] <= 1e-2) {
            xs.push_back(std::log(curve.pi1[i]));
            ys.push_back(curve.neg_loglik[i]);
        }
    }
    std::tie(curve.fit_slope, curve.fit_r2) = linear_fit(xs, ys);
    return curve;
}

std::vector<std::pair<int, double>> consistency_trend(const DatasetSpec& base,
                                                      const std::vector<int>& n_list,
                                                      Method method, int replications,
                                                      const HarnessConfig& config) {
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) {
            throw std::invalid_argument("consistency_trend: n_list must be increasing");
        }
    }
    std::vector<std::pair<int, double>> out;
    for (int n : n_list) {
        DatasetSpec spec = base;
        spec.n = n;
        spec.seed = Rng::child_seed(base.seed, static_cast<std::uint64_t>(n));
        const ExperimentReport report = run_replications(spec, method, replications, config);
        out.emplace_back(n, report.accuracy());
    }
    return out;
}

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::json doc;
    doc["method"] = report.method;
    doc["replications"] = report.replications;
    doc["true_order"] = report.true_order;
    doc["failures"] = report.failures;
    doc["accuracy"] = report.accuracy();
    doc["elapsed_seconds"] = report.elapsed_seconds;
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [m, count] : report.histogram) hist[std::to_string(m)] = count;
    doc["histogram"] = hist;
    doc["matched_stats"] = nlohmann::json::array();
    for (const ComponentStats& s : report.matched_stats) {
        nlohmann::json js;
        js["matched_count"] = s.matched_count;
        js["weight_mean"] = s.weight_mean;
        js["weight_std"] = s.weight_std;
        js["mean_mean"] = std::vector<double>(s.mean_mean.begin(), s.mean_mean.end());
        js["mean_std"] = std::vector<double>(s.mean_std.begin(), s.mean_std.end());
        js["eig_mean"] = std::vector<double>(s.eig_mean.begin(), s.eig_mean.end());
        js["eig_std"] = std::vector<double>(s.eig_std.begin(), s.eig_std.end());
        doc["matched_stats"].push_back(std::move(js));
    }
    return doc.dump(2);
}

void write_histogram_csv(const ExperimentReport& report, std::ostream& out) {
    out << "m_hat,count\n";
    for (const auto& [m, count] : report.histogram) out << m << ',' << count << '\n';
}

namespace {
std::string cell(double mean, double std) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f(%.4f)", mean, std);
    return buf;
}
}  // namespace

void write_component_stats_csv(const ExperimentReport& report, std::ostream& out) {
    const int d = report.matched_stats.empty()
                      ? 0
                      : static_cast<int>(report.matched_stats.front().mean_mean.size());
    out << "component,weight";
    for (int j = 1; j <= d; ++j) out << ",mean_" << j;
    for (int j = 1; j <= d; ++j) out << ",eig_" << j;
    out << '\n';
    for (std::size_t t = 0; t < report.matched_stats.size(); ++t) {
        const ComponentStats& s = report.matched_stats[t];
        out << (t + 1) << ',' << cell(s.weight_mean, s.weight_std);
        for (int j = 0; j < d; ++j) out << ',' << cell(s.mean_mean[j], s.mean_std[j]);
        for (int j = 0; j < d; ++j) out << ',' << cell(s.eig_mean[j], s.eig_std[j]);
        out << '\n';
    }
}

void write_profile_csv(const ProfileCurve& curve, std::ostream& out) {
    out << "pi1,neg_loglik\n";
    out.precision(17);
    for (std::size_t i = 0; i < curve.pi1.size(); ++i) {
        out << curve.pi1[i] << ',' << curve.neg_loglik[i] << '\n';
    }
    out << "# fit_window=[1e-4,1e-2] fit_r2=" << curve.fit_r2
        << " fit_slope=" << curve.fit_slope << '\n';
}

}  // namespace mixsel
