#include "idma/group_scad.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "idma/errors.hpp"
#include "idma/scad.hpp"

namespace idma {

namespace {

struct BlockEig {
    Eigen::MatrixXd q;       // eigenvectors of X_k'X_k
    Eigen::VectorXd lambda;  // eigenvalues, nonnegative
};

// root of sum_j s_j^2/(lambda_j*nu + q)^2 = 1 in nu > 0; h is strictly
// decreasing and h(0) > 1 is guaranteed by the caller's zero test
double solve_norm_equation(const Eigen::VectorXd& s, const Eigen::VectorXd& lambda, double q) {
    auto h = [&](double nu) {
        double acc = 0.0;
        for (int j = 0; j < s.size(); ++j) {
            const double den = lambda[j] * nu + q;
            acc += (s[j] * s[j]) / (den * den);
        }
        return acc;
    };
    double hi = 1.0;
    while (h(hi) > 1.0) {
        hi *= 2.0;
        if (hi > 1e14) throw SolverDiverged("group update: norm equation has no finite root");
    }
    double lo = hi * 0.5 > 1.0 ? hi * 0.5 : 0.0;
    if (h(lo) < 1.0) lo = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

GroupScadResult group_scad_regression(const GroupedDesign& blocks, const Eigen::VectorXd& response,
                                      double lambda_b, double scad_a, double tol, int lla_rounds) {
    check_scad_shape(scad_a);
    const int d = static_cast<int>(blocks.design.cols());
    const int g = blocks.groups();
    if (blocks.design.rows() != response.size())
        throw DimensionMismatch("group_scad_regression: response length mismatch");
    if (static_cast<int>(blocks.starts.size()) != g + 1 || blocks.starts[g] != d)
        throw DimensionMismatch("group_scad_regression: block layout inconsistent");
    if (lambda_b < 0.0) throw Error("group_scad_regression: lambda_b must be nonnegative");

    const Eigen::MatrixXd gram = blocks.design.transpose() * blocks.design;
    const Eigen::VectorXd xty = blocks.design.transpose() * response;
    const double yy = response.squaredNorm();
    const double scale = 1.0 + xty.lpNorm<Eigen::Infinity>();

    auto true_objective = [&](const Eigen::VectorXd& beta) {
        double obj = yy - 2.0 * beta.dot(xty) + beta.dot(gram * beta);
        for (int k = 0; k < g; ++k)
            if (blocks.penalized[k])
                obj += scad_value(beta.segment(blocks.starts[k], blocks.group_size(k)).norm(),
                                  lambda_b, scad_a);
        return obj;
    };

    // ridge-stabilized LS initializer for the LLA weights
    Eigen::MatrixXd ridge = gram;
    ridge.diagonal().array() += 1e-8;
    Eigen::VectorXd beta = ridge.ldlt().solve(xty);

    GroupScadResult res;
    if (lambda_b == 0.0) {
        res.coef = beta;
        res.group_norms.resize(g);
        for (int k = 0; k < g; ++k)
            res.group_norms[k] = beta.segment(blocks.starts[k], blocks.group_size(k)).norm();
        res.objective_trace.push_back(true_objective(beta));
        return res;
    }

    std::vector<BlockEig> eig(g);
    for (int k = 0; k < g; ++k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            gram.block(blocks.starts[k], blocks.starts[k], blocks.group_size(k),
                       blocks.group_size(k)));
        eig[k].q = es.eigenvectors();
        eig[k].lambda = es.eigenvalues().cwiseMax(0.0);
    }

    Eigen::VectorXd grad_full = gram * beta;  // maintained as (G*beta)
    auto set_block = [&](int k, const Eigen::VectorXd& value) {
        const int s = blocks.starts[k], w = blocks.group_size(k);
        const Eigen::VectorXd delta = value - beta.segment(s, w);
        if (delta.isZero(0.0)) return 0.0;
        grad_full += gram.middleCols(s, w) * delta;
        beta.segment(s, w) = value;
        return delta.lpNorm<Eigen::Infinity>();
    };

    for (int round = 0; round < lla_rounds; ++round) {
        Eigen::VectorXd w(g);
        for (int k = 0; k < g; ++k)
            w[k] = blocks.penalized[k]
                       ? scad_derivative(
                             beta.segment(blocks.starts[k], blocks.group_size(k)).norm(),
                             lambda_b, scad_a)
                       : 0.0;

        // weighted group lasso by block coordinate descent, exact block updates
        const int max_sweeps = 10000;
        bool ok = false;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            for (int k = 0; k < g; ++k) {
                const int s = blocks.starts[k], width = blocks.group_size(k);
                const Eigen::VectorXd r_k = xty.segment(s, width) - grad_full.segment(s, width) +
                                            gram.block(s, s, width, width) * beta.segment(s, width);
                if (w[k] > 0.0) {
                    const double q = 0.5 * w[k];
                    if (r_k.norm() <= q) {
                        set_block(k, Eigen::VectorXd::Zero(width));
                        continue;
                    }
                    const Eigen::VectorXd s_coord = eig[k].q.transpose() * r_k;
                    const double nu = solve_norm_equation(s_coord, eig[k].lambda, q);
                    Eigen::VectorXd bt(width);
                    for (int j = 0; j < width; ++j)
                        bt[j] = s_coord[j] * nu / (eig[k].lambda[j] * nu + q);
                    set_block(k, eig[k].q * bt);
                } else {
                    Eigen::MatrixXd gkk = gram.block(s, s, width, width);
                    gkk.diagonal().array() += 1e-12 * (1.0 + gkk.trace());
                    set_block(k, gkk.ldlt().solve(r_k));
                }
            }
            // KKT check of the weighted subproblem (fresh gradient, no drift)
            grad_full.noalias() = gram * beta;
            double viol = 0.0;
            for (int k = 0; k < g; ++k) {
                const int s = blocks.starts[k], width = blocks.group_size(k);
                const Eigen::VectorXd gk =
                    2.0 * (grad_full.segment(s, width) - xty.segment(s, width));
                const double norm_k = beta.segment(s, width).norm();
                double v;
                if (w[k] > 0.0 && norm_k == 0.0)
                    v = std::max(0.0, gk.norm() - w[k]);
                else if (w[k] > 0.0)
                    v = (gk + (w[k] / norm_k) * beta.segment(s, width)).norm();
                else
                    v = gk.norm();
                viol = std::max(viol, v);
            }
            if (viol <= tol * scale) {
                ok = true;
                break;
            }
        }
        if (!ok) res.converged = false;
        res.objective_trace.push_back(true_objective(beta));
        res.lla_rounds = round + 1;
    }

    res.coef = beta;
    res.group_norms.resize(g);
    for (int k = 0; k < g; ++k)
        res.group_norms[k] = beta.segment(blocks.starts[k], blocks.group_size(k)).norm();
    return res;
}

}  // namespace idma
