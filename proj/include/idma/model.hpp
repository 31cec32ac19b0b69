#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "idma/scad.hpp"

namespace idma {

/// Latent factors and loadings of the low-rank coefficient parameterization:
/// alpha_it = A*f_it, beta_it = B*f_it, theta_it = c'f_it.
struct FactorModel {
    int r = 0;
    Eigen::MatrixXd factors;    // nT x r, rows f_it
    Eigen::MatrixXd loading_a;  // p x r, rows a_k
    Eigen::MatrixXd loading_b;  // p x r, rows b_k (all-zero row = deselected)
    Eigen::VectorXd loading_c;  // r
};

/// Dense individualized coefficients and mediation effects.
struct CoefficientField {
    Eigen::MatrixXd alpha;        // nT x p
    Eigen::MatrixXd beta;         // nT x p
    Eigen::VectorXd theta;        // nT
    Eigen::MatrixXd gamma;        // nT x p, gamma = alpha (*) beta elementwise
    Eigen::VectorXd gamma_total;  // nT, row sums of gamma
};

/// Builds a consistent CoefficientField from factors and loadings.
CoefficientField assemble_coefficients(const FactorModel& fm);

/// Recomputes gamma/gamma_total from alpha and beta (exact by construction).
CoefficientField assemble_coefficients(Eigen::MatrixXd alpha, Eigen::MatrixXd beta,
                                       Eigen::VectorXd theta);

/**
 * Estimation hyperparameters. Regularization weights and the rank left
 * unset are resolved automatically (quantile rule for lambda_r, CV for
 * lambda_b, pilot scale for lambda_f, spectral ratio for the rank).
 */
struct Hyperparams {
    std::optional<double> lambda_r;
    std::optional<double> lambda_f;
    std::optional<double> lambda_b;
    std::optional<int> rank;
    int c_f = 0;  ///< subgroup count for the K-means variant; 0 = fully individualized
    double scad_a = kScadShape;
    double tol = 1e-6;
    int max_iter = 500;
    std::uint64_t seed = 0;
    bool crossfit = false;   ///< split-sample variant; default is full-sample
    int lla_rounds = 3;
    int alt_rounds = 1;      ///< alternating factor/loading refit rounds
    bool standardize = false;
};

/// Throws InvalidHyperparams on violated invariants.
void validate_hyperparams(const Hyperparams& h);

}  // namespace idma
