#include "idma/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>
#include <vector>

#include "idma/errors.hpp"

namespace idma {

ThinSvd thin_svd(const Eigen::MatrixXd& w, int k) {
    const int kmax = static_cast<int>(std::min(w.rows(), w.cols()));
    if (k < 1 || k > kmax)
        throw RankTooLarge("thin_svd: k=" + std::to_string(k) + " outside [1, " +
                           std::to_string(kmax) + "]");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw ConvergenceFailure("thin_svd: decomposition did not converge");

    ThinSvd out;
    out.u = svd.matrixU().leftCols(k);
    out.d = svd.singularValues().head(k);
    out.v = svd.matrixV().leftCols(k);

    // sign convention: largest-magnitude entry of each v column made positive
    for (int j = 0; j < k; ++j) {
        Eigen::Index arg = 0;
        out.v.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.v(arg, j) < 0.0) {
            out.v.col(j) = -out.v.col(j);
            out.u.col(j) = -out.u.col(j);
        }
    }
    return out;
}

Eigen::MatrixXd singular_value_shrink(const Eigen::MatrixXd& w, double nu) {
    if (nu < 0.0) throw Error("singular_value_shrink: nu must be nonnegative");
    if (nu == 0.0) return w;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw ConvergenceFailure("singular_value_shrink: SVD did not converge");
    Eigen::VectorXd d = (svd.singularValues().array() - nu).max(0.0);
    // drop the zeroed tail so the reconstruction costs only the surviving rank
    int r = 0;
    while (r < d.size() && d[r] > 0.0) ++r;
    if (r == 0) return Eigen::MatrixXd::Zero(w.rows(), w.cols());
    return svd.matrixU().leftCols(r) * d.head(r).asDiagonal() *
           svd.matrixV().leftCols(r).transpose();
}

double operator_norm(const Eigen::MatrixXd& w, double rel_tol, int max_iter) {
    if (w.size() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(w.cols());
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd u = w * v;
        const double nu = u.norm();
        if (nu == 0.0) return 0.0;
        Eigen::VectorXd wv = w.transpose() * (u / nu);
        const double next = wv.norm();
        if (next == 0.0) return 0.0;
        v = wv / next;
        if (std::abs(next - sigma) <= rel_tol * next) return next;
        sigma = next;
    }
    return sigma;
}

int count_distinct_rows(const Eigen::MatrixXd& m, double tol) {
    int count = 0;
    std::vector<int> reps;
    reps.reserve(16);
    for (int i = 0; i < m.rows(); ++i) {
        bool found = false;
        for (int r : reps) {
            if ((m.row(i) - m.row(r)).cwiseAbs().maxCoeff() <= tol) {
                found = true;
                break;
            }
        }
        if (!found) {
            reps.push_back(i);
            ++count;
        }
    }
    return count;
}

Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    return a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

}  // namespace idma
