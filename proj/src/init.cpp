#include "mixsel/init.hpp"

#include <limits>
#include <string>

#include "mixsel/errors.hpp"

namespace mixsel {

namespace {

// Squared distance of every row to its nearest chosen center so far.
void update_nearest_sq(const Matrix& data, const Vector& center, Vector& nearest_sq) {
    const Vector d2 = (data.rowwise() - center.transpose()).rowwise().squaredNorm();
    nearest_sq = nearest_sq.cwiseMin(d2);
}

Matrix seed_plus_plus(const Matrix& data, int clusters, Rng& rng) {
    const Eigen::Index n = data.rows();
    Matrix centers(clusters, data.cols());
    const Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    centers.row(0) = data.row(first);

    Vector nearest_sq = Vector::Constant(n, std::numeric_limits<double>::infinity());
    for (int k = 1; k < clusters; ++k) {
        update_nearest_sq(data, centers.row(k - 1).transpose(), nearest_sq);
        const double total = nearest_sq.sum();
        Eigen::Index pick;
        if (total <= 0.0) {
            // all mass collapsed (duplicate points); fall back to uniform
            pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        } else {
            const double u = rng.uniform() * total;
            double cum = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += nearest_sq[i];
                if (u < cum) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(k) = data.row(pick);
    }
    return centers;
}

}  // namespace

KMeansResult kmeans(const Matrix& data, int clusters, Rng& rng, int max_iter) {
    const Eigen::Index n = data.rows();
    if (clusters > n) {
        throw TooManyClusters("kmeans: " + std::to_string(clusters) + " clusters for " +
                              std::to_string(n) + " points");
    }
    if (clusters < 1) throw TooManyClusters("kmeans: cluster count must be >= 1");

    KMeansResult result;
    result.centers = seed_plus_plus(data, clusters, rng);
    result.labels.assign(static_cast<std::size_t>(n), 0);

    Vector dist_sq(n);
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(clusters));
    for (int iter = 0; iter < max_iter; ++iter) {
        // assignment step
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (data.row(i) - result.centers.row(0)).squaredNorm();
            for (int k = 1; k < clusters; ++k) {
                const double d = (data.row(i) - result.centers.row(k)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            dist_sq[i] = best_d;
            if (result.labels[static_cast<std::size_t>(i)] != best) {
                result.labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        result.inertia = dist_sq.sum();
        if (!changed && iter > 0) break;

        // update step
        Matrix sums = Matrix::Zero(clusters, data.cols());
        std::fill(counts.begin(), counts.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int k = result.labels[static_cast<std::size_t>(i)];
            sums.row(k) += data.row(i);
            ++counts[static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < clusters; ++k) {
            if (counts[static_cast<std::size_t>(k)] > 0) {
                result.centers.row(k) =
                    sums.row(k) / static_cast<double>(counts[static_cast<std::size_t>(k)]);
            } else {
                // reseed an empty cluster to the farthest point
                Eigen::Index far;
                dist_sq.maxCoeff(&far);
                result.centers.row(k) = data.row(far);
                dist_sq[far] = 0.0;
            }
        }
    }
    return result;
}

MixtureModel init_from_kmeans(const Matrix& data, int clusters, double cov_floor, Rng& rng) {
    const Eigen::Index n = data.rows();
    const Eigen::Index d = data.cols();
    if (static_cast<double>(clusters) > static_cast<double>(n) / static_cast<double>(d)) {
        throw InitTooManyComponents("init_from_kmeans: M = " + std::to_string(clusters) +
                                    " exceeds n/d = " +
                                    std::to_string(static_cast<double>(n) / static_cast<double>(d)));
    }
    const KMeansResult km = kmeans(data, clusters, rng);

    std::vector<Eigen::Index> counts(static_cast<std::size_t>(clusters), 0);
    for (int label : km.labels) ++counts[static_cast<std::size_t>(label)];

    // within-cluster scatter; also pooled scatter for undersized clusters
    std::vector<Matrix> scatter(static_cast<std::size_t>(clusters), Matrix::Zero(d, d));
    Matrix pooled = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int k = km.labels[static_cast<std::size_t>(i)];
        const Vector diff = data.row(i).transpose() - km.centers.row(k).transpose();
        const Matrix outer = diff * diff.transpose();
        scatter[static_cast<std::size_t>(k)] += outer;
        pooled += outer;
    }
    pooled /= static_cast<double>(n);

    Vector weights(clusters);
    std::vector<Component> components;
    components.reserve(static_cast<std::size_t>(clusters));
    for (int k = 0; k < clusters; ++k) {
        const Eigen::Index count = counts[static_cast<std::size_t>(k)];
        weights[k] = static_cast<double>(count) / static_cast<double>(n);
        Matrix cov = count >= d + 1
                         ? Matrix(scatter[static_cast<std::size_t>(k)] / static_cast<double>(count))
                         : pooled;
        const double floor = cov_floor > 0.0 ? cov_floor : default_cov_floor(cov);
        components.push_back({km.centers.row(k).transpose(), regularize_cov(cov, floor)});
    }
    return MixtureModel(std::move(weights), std::move(components));
}

}  // namespace mixsel
