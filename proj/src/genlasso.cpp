#include "idma/genlasso.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "idma/errors.hpp"
#include "idma/linalg.hpp"

namespace idma {

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// || X'(X*beta - y) + D'v ||_inf with v the clamped dual estimate
double kkt_residual(const GenLassoProblem& prob, const Eigen::VectorXd& beta,
                    const Eigen::VectorXd& dual) {
    Eigen::VectorXd v = dual.cwiseMin(prob.weights).cwiseMax(-prob.weights);
    Eigen::VectorXd g = prob.design.transpose() * (prob.design * beta - prob.response);
    if (prob.diff_op.rows() > 0) g += prob.diff_op.transpose() * v;
    return g.lpNorm<Eigen::Infinity>();
}

}  // namespace

Eigen::VectorXd solve_generalized_lasso(const GenLassoProblem& prob, double tol) {
    const int d = static_cast<int>(prob.design.cols());
    const int e = static_cast<int>(prob.diff_op.rows());
    if (prob.response.size() != prob.design.rows())
        throw DimensionMismatch("generalized lasso: response/design row mismatch");
    if (e > 0 && prob.diff_op.cols() != d)
        throw DimensionMismatch("generalized lasso: diff_op column mismatch");
    if (prob.weights.size() != e)
        throw DimensionMismatch("generalized lasso: one weight per penalty row required");
    if (e > 0 && prob.weights.minCoeff() < 0.0)
        throw Error("generalized lasso: weights must be nonnegative");

    const double wmax = e > 0 ? prob.weights.maxCoeff() : 0.0;
    if (e == 0 || wmax == 0.0)
        return pinv_solve(prob.design, prob.response);

    const Eigen::MatrixXd gram = prob.design.transpose() * prob.design;
    const Eigen::VectorXd xty = prob.design.transpose() * prob.response;
    const Eigen::MatrixXd dtd = prob.diff_op.transpose() * prob.diff_op;
    const double scale = 1.0 + xty.lpNorm<Eigen::Infinity>();

    double rho = std::clamp(prob.weights.sum() / e, 1.0, 1e6);
    Eigen::LDLT<Eigen::MatrixXd> solver(gram + rho * dtd);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(e);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(e);  // scaled dual

    const int max_iter = 50000;
    for (int it = 0; it < max_iter; ++it) {
        beta = solver.solve(xty + rho * (prob.diff_op.transpose() * (z - u)));
        const Eigen::VectorXd db = prob.diff_op * beta;
        const Eigen::VectorXd z_old = z;
        for (int j = 0; j < e; ++j) z[j] = soft_threshold(db[j] + u[j], prob.weights[j] / rho);
        u += db - z;

        if (it % 10 == 9) {
            if (kkt_residual(prob, beta, rho * u) <= tol * scale) return beta;
            // residual balancing keeps both ADMM residuals shrinking
            const double primal = (db - z).norm();
            const double dual = (rho * prob.diff_op.transpose() * (z - z_old)).norm();
            if (primal > 10.0 * dual && rho < 1e10) {
                rho *= 2.0;
                u *= 0.5;
                solver.compute(gram + rho * dtd);
            } else if (dual > 10.0 * primal && rho > 1e-8) {
                rho *= 0.5;
                u *= 2.0;
                solver.compute(gram + rho * dtd);
            }
        }
    }
    if (kkt_residual(prob, beta, rho * u) <= 10.0 * tol * scale) return beta;
    throw SolverDiverged("generalized lasso ADMM did not reach the KKT tolerance");
}

}  // namespace idma
