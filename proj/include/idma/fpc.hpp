#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace idma {

/// Loss-and-gradient oracle: returns the loss at `a` and writes its gradient
/// (same shape as `a`) into `grad`.
using LossGradOracle = std::function<double(const Eigen::MatrixXd& a, Eigen::MatrixXd& grad)>;

struct FpcResult {
    Eigen::MatrixXd a;                    ///< solution iterate
    bool converged = false;               ///< false = max_iter reached (warning, not fatal)
    int iterations = 0;
    double loss = 0.0;                    ///< unpenalized loss at the solution
    std::vector<double> objective_trace;  ///< penalized objective per accepted iterate
};

/**
 * Fixed-point iteration for nuclear-norm-penalized loss minimization:
 *
 *   a_{k+1} = S_{tau*lambda}( a_k - tau * grad(a_k) ),   tau = 1/lip.
 *
 * Stops when the unpenalized loss changes by less than tol between
 * iterations, or after max_iter steps. With tau <= 1/(Lipschitz constant of
 * the gradient) the penalized objective is non-increasing.
 */
FpcResult fpc_nuclear(const LossGradOracle& oracle, double lip, double lambda_r,
                      const Eigen::MatrixXd& a0, double tol = 1e-6, int max_iter = 500);

}  // namespace idma
