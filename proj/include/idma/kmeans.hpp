#pragma once

#include <Eigen/Dense>
#include <vector>

#include "idma/rng.hpp"

namespace idma {

/// Lloyd's K-means with k-means++ seeding and multiple restarts; the best
/// within-cluster sum of squares over all restarts wins. Empty clusters are
/// handled by re-seeding from the farthest point. Labels are 0-based.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, RngStream rng, int restarts = 10,
                        int max_iter = 200);

}  // namespace idma
