#pragma once

#include <Eigen/Dense>

namespace idma {

/// Truncated singular value decomposition, d sorted descending.
struct ThinSvd {
    Eigen::MatrixXd u;  // m x k
    Eigen::VectorXd d;  // k, nonnegative, descending
    Eigen::MatrixXd v;  // n x k
};

/**
 * Top-k singular triplets of w.
 *
 * A deterministic sign convention is applied: each column of v is flipped so
 * that its largest-magnitude entry is positive (u flipped to match), so that
 * factor/loading extraction is reproducible while u*diag(d)*v' is unchanged.
 */
ThinSvd thin_svd(const Eigen::MatrixXd& w, int k);

/// Matrix shrinkage operator S_nu: subtracts nu from every singular value,
/// flooring at zero. The proximal operator of nu * nuclear norm.
Eigen::MatrixXd singular_value_shrink(const Eigen::MatrixXd& w, double nu);

/// Largest singular value via power iteration on w'w (relative tolerance).
double operator_norm(const Eigen::MatrixXd& w, double rel_tol = 1e-6, int max_iter = 1000);

/// Number of distinct rows under a max-abs-difference tolerance.
int count_distinct_rows(const Eigen::MatrixXd& m, double tol = 1e-6);

/// Least-squares solve via thin SVD pseudo-inverse (minimum-norm solution).
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace idma
