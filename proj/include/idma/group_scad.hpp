#pragma once

#include <Eigen/Dense>
#include <vector>

namespace idma {

/// Column-blocked design matrix. Block k spans columns
/// [starts[k], starts[k+1]); penalized[k] marks whether its coefficient
/// block enters the group penalty.
struct GroupedDesign {
    Eigen::MatrixXd design;       // N x d
    std::vector<int> starts;      // size G+1, starts[G] == d
    std::vector<bool> penalized;  // size G

    int groups() const { return static_cast<int>(penalized.size()); }
    int group_size(int k) const { return starts[k + 1] - starts[k]; }
};

struct GroupScadResult {
    Eigen::VectorXd coef;
    std::vector<double> group_norms;
    std::vector<double> objective_trace;  ///< true objective after each LLA round
    bool converged = true;
    int lla_rounds = 0;
};

/**
 * Group-SCAD-penalized least squares:
 *
 *   minimize  ||y - X*beta||^2 + sum_{penalized k} p_SCAD(||beta_k||_2; lambda_b, a)
 *
 * solved by local linear approximation: the concave penalty is majorized at
 * the current iterate by a weighted group-lasso problem, which block
 * coordinate descent solves with exact zero blocks. Groups estimated at zero
 * are exactly zero vectors.
 */
GroupScadResult group_scad_regression(const GroupedDesign& blocks, const Eigen::VectorXd& response,
                                      double lambda_b, double scad_a, double tol = 1e-8,
                                      int lla_rounds = 3);

}  // namespace idma
