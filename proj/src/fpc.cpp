#include "idma/fpc.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "idma/errors.hpp"

namespace idma {

FpcResult fpc_nuclear(const LossGradOracle& oracle, double lip, double lambda_r,
                      const Eigen::MatrixXd& a0, double tol, int max_iter) {
    if (!(lip > 0.0)) throw Error("fpc_nuclear: Lipschitz bound must be positive");
    if (lambda_r < 0.0) throw Error("fpc_nuclear: lambda_r must be nonnegative");

    const double tau = 1.0 / lip;
    FpcResult res;
    res.a = a0;

    Eigen::MatrixXd grad(a0.rows(), a0.cols());
    double loss = oracle(res.a, grad);
    double nn = 0.0;  // nuclear norm of the current iterate
    if (lambda_r > 0.0 && !res.a.isZero(0.0)) nn = res.a.bdcSvd().singularValues().sum();
    res.objective_trace.push_back(loss + lambda_r * nn);

    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd step = res.a - tau * grad;
        if (lambda_r > 0.0) {
            Eigen::BDCSVD<Eigen::MatrixXd> svd(step, Eigen::ComputeThinU | Eigen::ComputeThinV);
            if (svd.info() != Eigen::Success)
                throw ConvergenceFailure("fpc_nuclear: SVD did not converge");
            Eigen::VectorXd d = (svd.singularValues().array() - tau * lambda_r).max(0.0);
            int r = 0;
            while (r < d.size() && d[r] > 0.0) ++r;
            nn = d.head(r).sum();
            if (r == 0) {
                res.a.setZero();
            } else {
                res.a.noalias() = svd.matrixU().leftCols(r) * d.head(r).asDiagonal() *
                                  svd.matrixV().leftCols(r).transpose();
            }
        } else {
            res.a = std::move(step);
        }

        const double prev_loss = loss;
        loss = oracle(res.a, grad);
        res.objective_trace.push_back(loss + lambda_r * nn);
        res.iterations = it + 1;
        if (std::abs(loss - prev_loss) < tol) {
            res.converged = true;
            break;
        }
    }
    res.loss = loss;
    return res;
}

}  // namespace idma
