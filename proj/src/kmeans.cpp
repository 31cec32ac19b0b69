#include "idma/kmeans.hpp"

#include <limits>

#include "idma/errors.hpp"

namespace idma {

namespace {

double assign(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers, std::vector<int>& lab) {
    double wcss = 0.0;
    for (int i = 0; i < pts.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int c = 0; c < centers.rows(); ++c) {
            const double d = (pts.row(i) - centers.row(c)).squaredNorm();
            if (d < best) {
                best = d;
                arg = c;
            }
        }
        lab[i] = arg;
        wcss += best;
    }
    return wcss;
}

}  // namespace

std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, RngStream rng, int restarts,
                        int max_iter) {
    const int n = static_cast<int>(points.rows());
    if (k < 1 || k > n) throw Error("kmeans: need 1 <= k <= number of points");
    if (k == 1) return std::vector<int>(n, 0);

    std::vector<int> best_labels(n, 0);
    double best_wcss = std::numeric_limits<double>::infinity();

    for (int rs = 0; rs < restarts; ++rs) {
        RngStream r = rng.substream(rs);

        // k-means++ seeding
        Eigen::MatrixXd centers(k, points.cols());
        centers.row(0) = points.row(r.uniform_int(n));
        Eigen::VectorXd dist2(n);
        for (int c = 1; c < k; ++c) {
            for (int i = 0; i < n; ++i) {
                double d = std::numeric_limits<double>::infinity();
                for (int j = 0; j < c; ++j)
                    d = std::min(d, (points.row(i) - centers.row(j)).squaredNorm());
                dist2[i] = d;
            }
            const double total = dist2.sum();
            if (total <= 0.0) {
                centers.row(c) = points.row(r.uniform_int(n));  // duplicated points
                continue;
            }
            double u = r.uniform01() * total;
            int pick = n - 1;
            for (int i = 0; i < n; ++i) {
                u -= dist2[i];
                if (u <= 0.0) {
                    pick = i;
                    break;
                }
            }
            centers.row(c) = points.row(pick);
        }

        std::vector<int> labels(n, 0);
        double wcss = assign(points, centers, labels);
        for (int it = 0; it < max_iter; ++it) {
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
            Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
            for (int i = 0; i < n; ++i) {
                sums.row(labels[i]) += points.row(i);
                counts[labels[i]] += 1;
            }
            for (int c = 0; c < k; ++c) {
                if (counts[c] == 0) {
                    // re-seed an empty cluster at the point farthest from its center
                    int far = 0;
                    double fd = -1.0;
                    for (int i = 0; i < n; ++i) {
                        const double d = (points.row(i) - centers.row(labels[i])).squaredNorm();
                        if (d > fd) {
                            fd = d;
                            far = i;
                        }
                    }
                    centers.row(c) = points.row(far);
                } else {
                    centers.row(c) = sums.row(c) / counts[c];
                }
            }
            const double next = assign(points, centers, labels);
            if (next >= wcss - 1e-12 * (1.0 + wcss)) {
                wcss = std::min(wcss, next);
                break;
            }
            wcss = next;
        }
        if (wcss < best_wcss) {
            best_wcss = wcss;
            best_labels = labels;
        }
    }
    return best_labels;
}

}  // namespace idma
