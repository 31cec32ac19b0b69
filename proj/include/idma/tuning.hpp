#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "idma/model.hpp"
#include "idma/panel.hpp"

namespace idma {

/// Grid for the modified-BIC scan over (lambda_f, c_f).
struct TuneGrid {
    std::vector<double> lambda_f_grid;  ///< multiples of the pilot scale when from_pilot
    std::vector<int> c_f_grid;          ///< 0 = no clustering
    bool lambda_f_from_pilot = true;    ///< interpret lambda_f_grid as pilot multiples
    int folds = 5;
    double bic_c1 = 0.5;
    double bic_c2 = 0.5;
    int quantile_draws = 200;
};

/// Default grid: 8 log-spaced fusion weights (pilot multiples) x c_f in 0..4.
TuneGrid default_tune_grid();

struct BicCandidate {
    double lambda_f = 0.0;
    int c_f = 0;
    double loss_m = 0.0;
    double loss_y = 0.0;
    int df_f = 0;  ///< distinct rows of the fitted factor matrix
    int df_b = 0;  ///< nonzero rows of the fitted loading_b
    double score = 0.0;
    bool failed = false;
    std::string error;
};

struct BicReport {
    std::vector<BicCandidate> candidates;
    int best_index = -1;
};

/// Pooled residual variance of column-wise least squares of each mediator on
/// [1, x]; the plug-in noise scale for the lambda_r quantile rule.
double estimate_noise_variance(const PanelData& panel);

/// Quantile rule: lambda_r = 2.2 * Q_{0.95}( ||Delta (*) X~||_op ) over Monte
/// Carlo draws Delta ~ N(0, sigma2) i.i.d., X~ = X (x) 1_p'. Scale-equivariant
/// in sigma under common random numbers.
double select_lambda_r(const PanelData& panel, double sigma2, int draws, std::uint64_t seed);

/// 5-fold (by default) cross-validation for lambda_b: folds partition
/// individuals; returns the grid value minimizing mean held-out squared error
/// of the outcome model (ties toward the larger value) plus the CV curve.
std::pair<double, std::vector<double>> select_lambda_b_cv(const Eigen::MatrixXd& factors,
                                                          const PanelData& panel,
                                                          const std::vector<double>& lambda_grid,
                                                          int folds, std::uint64_t seed,
                                                          double scad_a = kScadShape,
                                                          int lla_rounds = 3);

/// Data-scaled default grid for lambda_b (log-spaced up to the all-zero bound).
std::vector<double> default_lambda_b_grid(const Eigen::MatrixXd& factors, const PanelData& panel,
                                          int points = 8);

/// Modified BIC:
///   log(lM/nT) + log(lY/nT) + c_N r df_f + d_N r df_b,
///   c_N = C1 loglog(nT) log(p)/(nT),  d_N = C2 loglog(nT)/(nT).
double bic_score(double loss_m, double loss_y, int df_f, int df_b, int n, int T, int p, int r,
                 double c1, double c2);

/// Fits every (lambda_f, c_f) candidate (sharing one FPC initialization),
/// scores each with the modified BIC, and returns the winning hyperparameters
/// (ties broken toward larger lambda_f, then smaller c_f). Failed candidates
/// are recorded in the report and skipped.
std::pair<Hyperparams, BicReport> tune_bic(const PanelData& panel, const TuneGrid& grid,
                                           const Hyperparams& base_hyper);

/// Spectral-ratio rank estimate: argmax_{j <= max_rank} d_j / d_{j+1}.
int estimate_rank(const Eigen::VectorXd& singular_values, int max_rank);

}  // namespace idma
