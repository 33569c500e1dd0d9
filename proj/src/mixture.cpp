#include "mixsel/mixture.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mixsel/errors.hpp"

namespace mixsel {

MixtureModel::MixtureModel(Vector weights, std::vector<Component> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty()) {
        throw DimensionMismatch("MixtureModel: at least one component required");
    }
    if (weights_.size() != static_cast<Eigen::Index>(components_.size())) {
        throw DimensionMismatch("MixtureModel: weight/component count mismatch");
    }
    if (weights_.minCoeff() < 0.0) {
        throw DimensionMismatch("MixtureModel: negative weight");
    }
    if (std::abs(weights_.sum() - 1.0) > 1e-10) {
        throw DimensionMismatch("MixtureModel: weights must sum to 1, got " +
                                std::to_string(weights_.sum()));
    }
    const Eigen::Index d = components_.front().mean.size();
    for (const Component& c : components_) {
        if (c.mean.size() != d || c.cov.rows() != d || c.cov.cols() != d) {
            throw DimensionMismatch("MixtureModel: inconsistent component dimensions");
        }
    }
}

namespace {

// n x M matrix of log pi_m + log phi_m(x_i). Zero weights map to -inf,
// which log-sum-exp ignores.
Matrix weighted_log_densities(const MixtureModel& model, const Matrix& data) {
    if (data.cols() != model.dim()) {
        throw DimensionMismatch("mixture: data dimension does not match model");
    }
    const int m_count = model.order();
    Matrix logw(data.rows(), m_count);
    Vector col(data.rows());
    for (int m = 0; m < m_count; ++m) {
        const Component& c = model.component(m);
        GaussianFactor factor(c.mean, c.cov);
        factor.log_density_rows(data, col);
        const double w = model.weights()[m];
        const double logpi = w > 0.0 ? std::log(w)
                                     : -std::numeric_limits<double>::infinity();
        logw.col(m) = col.array() + logpi;
    }
    return logw;
}

// Row-wise log-sum-exp; throws if a whole row is -inf.
Vector row_logsumexp(const Matrix& logw) {
    Vector out(logw.rows());
    for (Eigen::Index i = 0; i < logw.rows(); ++i) {
        const double mx = logw.row(i).maxCoeff();
        if (!std::isfinite(mx)) {
            throw DegenerateDensity(
                "all component densities vanished for observation " +
                std::to_string(i));
        }
        out[i] = mx + std::log((logw.row(i).array() - mx).exp().sum());
    }
    return out;
}

}  // namespace

double log_likelihood(const MixtureModel& model, const Matrix& data) {
    const Matrix logw = weighted_log_densities(model, data);
    return row_logsumexp(logw).sum();
}

std::pair<Responsibilities, double> responsibilities_and_loglik(
    const MixtureModel& model, const Matrix& data) {
    Matrix logw = weighted_log_densities(model, data);
    const Vector lse = row_logsumexp(logw);
    logw.colwise() -= lse;
    return {logw.array().exp().matrix(), lse.sum()};
}

Responsibilities responsibilities(const MixtureModel& model, const Matrix& data) {
    return responsibilities_and_loglik(model, data).first;
}

std::vector<Component> weighted_mle_update(const Matrix& data,
                                           const Responsibilities& resp,
                                           double cov_floor,
                                           double min_mass) {
    if (resp.rows() != data.rows()) {
        throw DimensionMismatch("weighted_mle_update: row count mismatch");
    }
    const Eigen::Index d = data.cols();
    const double mass_floor = min_mass > 0.0 ? min_mass : static_cast<double>(d + 1);
    std::vector<Component> out;
    out.reserve(static_cast<std::size_t>(resp.cols()));
    for (Eigen::Index m = 0; m < resp.cols(); ++m) {
        const Vector h = resp.col(m);
        const double mass = h.sum();
        if (mass <= mass_floor) {
            throw EmptyComponent(static_cast<int>(m),
                                 "component " + std::to_string(m) +
                                     " has responsibility mass " + std::to_string(mass));
        }
        const Vector mean = data.transpose() * h / mass;
        const Matrix centered = data.rowwise() - mean.transpose();
        const Matrix cov =
            centered.transpose() * (centered.array().colwise() * h.array()).matrix() / mass;
        const double floor = cov_floor > 0.0 ? cov_floor : default_cov_floor(cov);
        out.push_back({mean, regularize_cov(cov, floor)});
    }
    return out;
}

Matrix sample_mixture(const MixtureModel& model, int n, Rng& rng) {
    Matrix out(n, model.dim());
    const Vector& w = model.weights();
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        double cum = 0.0;
        int pick = model.order() - 1;
        for (int m = 0; m < model.order(); ++m) {
            cum += w[m];
            if (u < cum) {
                pick = m;
                break;
            }
        }
        const Component& c = model.component(pick);
        out.row(i) = sample_gaussian(c.mean, c.cov, rng).transpose();
    }
    return out;
}

std::string model_to_json(const MixtureModel& model) {
    nlohmann::json doc;
    doc["dim"] = model.dim();
    doc["weights"] = std::vector<double>(model.weights().begin(), model.weights().end());
    doc["components"] = nlohmann::json::array();
    for (const Component& c : model.components()) {
        nlohmann::json jc;
        jc["mean"] = std::vector<double>(c.mean.begin(), c.mean.end());
        std::vector<std::vector<double>> cov;
        for (Eigen::Index r = 0; r < c.cov.rows(); ++r) {
            cov.emplace_back(c.cov.row(r).begin(), c.cov.row(r).end());
        }
        jc["cov"] = cov;
        doc["components"].push_back(std::move(jc));
    }
    return doc.dump(2);
}

MixtureModel model_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    const int d = doc.at("dim").get<int>();
    const auto weights_raw = doc.at("weights").get<std::vector<double>>();
    Vector weights = Eigen::Map<const Vector>(weights_raw.data(),
                                              static_cast<Eigen::Index>(weights_raw.size()));
    std::vector<Component> components;
    for (const auto& jc : doc.at("components")) {
        const auto mean_raw = jc.at("mean").get<std::vector<double>>();
        Vector mean = Eigen::Map<const Vector>(mean_raw.data(),
                                               static_cast<Eigen::Index>(mean_raw.size()));
        const auto cov_raw = jc.at("cov").get<std::vector<std::vector<double>>>();
        Matrix cov(d, d);
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) cov(r, c) = cov_raw.at(r).at(c);
        }
        components.push_back({std::move(mean), std::move(cov)});
    }
    return MixtureModel(std::move(weights), std::move(components));
}

void save_model(const MixtureModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << model_to_json(model) << '\n';
}

MixtureModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace mixsel
