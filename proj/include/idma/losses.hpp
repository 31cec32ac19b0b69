#pragma once

#include <Eigen/Dense>

#include "idma/panel.hpp"

namespace idma {

/// Mediator-model loss: sum over (i,t) of ||M_it - alpha_it * x_it||^2.
/// alpha is nT x p in the panel's row layout.
double loss_mediator(const Eigen::MatrixXd& alpha, const PanelData& panel);

/// Outcome-model loss: sum over (i,t) of (Y_it - theta_it*x_it - beta_it'M_it)^2.
/// theta is length nT, beta is nT x p.
double loss_outcome(const Eigen::VectorXd& theta, const Eigen::MatrixXd& beta,
                    const PanelData& panel);

}  // namespace idma
