#pragma once

#include <vector>

#include "mixsel/mixture.hpp"
#include "mixsel/rng.hpp"

namespace mixsel {

struct KMeansResult {
    std::vector<int> labels;  // n entries in [0, M)
    Matrix centers;           // M x d
    double inertia = 0.0;     // sum of squared distances to assigned centers
};

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are reseeded to
/// the point farthest from its assigned center. Deterministic given the rng
/// seed. Throws TooManyClusters when M > n.
KMeansResult kmeans(const Matrix& data, int clusters, Rng& rng, int max_iter = 100);

/// Converts a k-means clustering into an initial mixture: weights are cluster
/// proportions, means the centers, covariances the within-cluster covariances
/// (clusters with fewer than d+1 points inherit the pooled covariance), all
/// regularized to the eigenvalue floor. cov_floor <= 0 selects the
/// per-matrix default. Throws InitTooManyComponents when M > n/d.
MixtureModel init_from_kmeans(const Matrix& data, int clusters, double cov_floor, Rng& rng);

}  // namespace mixsel
