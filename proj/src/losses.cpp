#include "idma/losses.hpp"

#include "idma/errors.hpp"

namespace idma {

double loss_mediator(const Eigen::MatrixXd& alpha, const PanelData& panel) {
    if (alpha.rows() != panel.rows() || alpha.cols() != panel.p)
        throw DimensionMismatch("loss_mediator: alpha must be (n*T) x p");
    return (panel.m.array() - alpha.array().colwise() * panel.x.array()).matrix().squaredNorm();
}

double loss_outcome(const Eigen::VectorXd& theta, const Eigen::MatrixXd& beta,
                    const PanelData& panel) {
    if (theta.size() != panel.rows())
        throw DimensionMismatch("loss_outcome: theta must have n*T entries");
    if (beta.rows() != panel.rows() || beta.cols() != panel.p)
        throw DimensionMismatch("loss_outcome: beta must be (n*T) x p");
    const Eigen::VectorXd fitted =
        theta.cwiseProduct(panel.x) + (beta.array() * panel.m.array()).rowwise().sum().matrix();
    return (panel.y - fitted).squaredNorm();
}

}  // namespace idma
