#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "idma/model.hpp"
#include "idma/panel.hpp"
#include "idma/rng.hpp"

namespace idma {

/// Sample-splitting layout: part_a/part_b partition [n] minus the held-out
/// individual (held_out = -1 means no hold-out).
struct SplitPlan {
    int held_out = -1;
    std::vector<int> part_a;  // size ceil(m/2) where m = n - (held_out >= 0)
    std::vector<int> part_b;
};

SplitPlan make_split_plan(int n, int held_out, RngStream rng);

/// Low-rank initialization: nuclear-norm-penalized mediator-model solution,
/// decomposed as factors (U*D, nT x r) and loadings (V, p x r).
struct InitFactorization {
    Eigen::MatrixXd factors;
    Eigen::MatrixXd loading_a;
    Eigen::VectorXd spectrum;  ///< full singular values of the penalized solution
    double lambda_r = 0.0;
    int rank = 0;
    bool fpc_converged = true;
};

InitFactorization init_factorization(const PanelData& panel, double lambda_r, int rank,
                                     double tol = 1e-6, int max_iter = 500);

/// Variant resolving lambda_r by the quantile rule and the rank by the
/// spectral ratio estimator when the hyperparameters leave them unset.
InitFactorization init_factorization_auto(const PanelData& panel, const Hyperparams& hyper);

/// Fused-SCAD factor-path update for one individual (or a pooled update over
/// several individuals sharing one path): minimizes
///   sum_t ||M_it - A f_t x_it||^2 + sum_{t>=2} sum_r' p_SCAD(f_{t,r'} - f_{t-1,r'})
/// via LLA reduced to weighted generalized-lasso subproblems. Returns T x r.
Eigen::MatrixXd update_factors_fused(const Eigen::MatrixXd& loading_a, const PanelData& panel,
                                     const std::vector<int>& individuals, double lambda_f,
                                     double scad_a = kScadShape, int lla_rounds = 3,
                                     double tol = 1e-6);

/// Least-squares loading refit given factors: row k solves the normal
/// equations of mediator column k with design rows f_it * x_it.
Eigen::MatrixXd update_loadings(const Eigen::MatrixXd& factors, const PanelData& panel);

/// Outcome-model fit: group-SCAD over mediator blocks m_itk * f_it' with an
/// unpenalized exposure block x_it * f_it'. Returns (loading_b, loading_c).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> fit_outcome(const Eigen::MatrixXd& factors,
                                                        const PanelData& panel, double lambda_b,
                                                        double scad_a = kScadShape,
                                                        double tol = 1e-8, int lla_rounds = 3);

/// Noise-removal rule: zero row k when ||b_k|| < mean + 0.5 * standard error
/// of the row norms (strict comparison).
Eigen::MatrixXd threshold_b(const Eigen::MatrixXd& loading_b);

/// K-means on vectorized per-individual factor trajectories; returns 0-based
/// membership of length n.
std::vector<int> kmeans_subgroup_factors(const Eigen::MatrixXd& factors, int n, int T, int c_f,
                                         RngStream rng);

struct IdmaFit {
    FactorModel factor_model;
    CoefficientField coefficients;
    std::vector<int> selected;  ///< mediators k with nonzero loading_b row
    double loss_m = 0.0, loss_y = 0.0;
    Eigen::VectorXd singular_values;         ///< spectrum of the initial penalized solution
    std::vector<int> distinct_factor_rows;   ///< per individual
    std::vector<int> subgroup;               ///< K-means membership (empty when c_f = 0)

    bool fpc_converged = true;
    bool factor_stage_converged = true;
    bool outcome_stage_converged = true;

    // hyperparameters actually used after auto-resolution
    double lambda_r_used = 0.0, lambda_f_used = 0.0, lambda_b_used = 0.0;
    int rank_used = 0;

    // diagnostics for the monotone-pipeline property: L_M at the
    // initialization and the fused penalty evaluated at the LLA start
    double loss_m_init = 0.0;
    double fused_penalty_init = 0.0;
};

/// End-to-end estimation. Full-sample by default; hyper.crossfit enables the
/// split-sample variant whose coefficients are the average of two half-fits.
IdmaFit fit_idma(const PanelData& panel, const Hyperparams& hyper);

/// Full-sample pipeline reusing a precomputed initialization (saves the FPC
/// solve when scanning tuning grids).
IdmaFit fit_idma_with_init(const PanelData& panel, const Hyperparams& hyper,
                           const InitFactorization& init);

/// Recomputes the dense mediation-effect field from the fitted factor model.
CoefficientField mediation_effects(const IdmaFit& fit);

}  // namespace idma
