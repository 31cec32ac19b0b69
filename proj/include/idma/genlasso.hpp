#pragma once

#include <Eigen/Dense>

namespace idma {

/**
 * Weighted generalized lasso:
 *
 *   minimize over beta   0.5*||response - design*beta||^2
 *                        + sum_e weights[e] * |diff_op.row(e) * beta|
 *
 * The penalty rows typically form a first-difference structure (fused
 * lasso); per-row weights come from a local linear approximation of a
 * folded-concave penalty.
 */
struct GenLassoProblem {
    Eigen::MatrixXd design;    // N x d
    Eigen::VectorXd response;  // N
    Eigen::MatrixXd diff_op;   // e x d
    Eigen::VectorXd weights;   // e, nonnegative
};

/// Solves the problem by ADMM (splitting on z = D*beta) until the KKT
/// subgradient residual falls below tol. All weights zero reduces to the
/// minimum-norm least-squares solution.
Eigen::VectorXd solve_generalized_lasso(const GenLassoProblem& prob, double tol = 1e-6);

}  // namespace idma
