#include "idma/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idma/errors.hpp"
#include "idma/estimator.hpp"
#include "idma/group_scad.hpp"
#include "idma/linalg.hpp"
#include "idma/losses.hpp"
#include "idma/rng.hpp"

namespace idma {

TuneGrid default_tune_grid() {
    TuneGrid grid;
    grid.lambda_f_grid.resize(8);
    const double lo = 0.05, hi = 30.0;
    for (int j = 0; j < 8; ++j)
        grid.lambda_f_grid[j] = lo * std::pow(hi / lo, j / 7.0);
    grid.c_f_grid = {0, 1, 2, 3, 4};
    return grid;
}

double estimate_noise_variance(const PanelData& panel) {
    const int nt = panel.rows();
    if (nt <= 2) throw DimensionMismatch("estimate_noise_variance requires n*T > 2");
    Eigen::MatrixXd design(nt, 2);
    design.col(0).setOnes();
    design.col(1) = panel.x;
    const Eigen::MatrixXd coef =
        (design.transpose() * design).ldlt().solve(design.transpose() * panel.m);
    const double rss = (panel.m - design * coef).squaredNorm();
    return rss / (static_cast<double>(panel.p) * (nt - 2));
}

double select_lambda_r(const PanelData& panel, double sigma2, int draws, std::uint64_t seed) {
    if (draws < 1) throw Error("select_lambda_r: draws must be positive");
    const double sigma = std::sqrt(std::max(sigma2, 0.0));
    if (sigma == 0.0) return 0.0;
    RngStream rng(seed, streams::kLambdaR);
    std::vector<double> norms(draws);
    Eigen::MatrixXd delta(panel.rows(), panel.p);
    for (int d = 0; d < draws; ++d) {
        RngStream draw = rng.substream(d);
        for (int c = 0; c < delta.cols(); ++c)
            for (int rr = 0; rr < delta.rows(); ++rr) delta(rr, c) = sigma * draw.normal();
        // Hadamard with X~ = X (x) 1_p': every column scaled by x elementwise
        const Eigen::MatrixXd masked = delta.array().colwise() * panel.x.array();
        norms[d] = operator_norm(masked);
    }
    std::sort(norms.begin(), norms.end());
    const int idx = std::max(0, static_cast<int>(std::ceil(0.95 * draws)) - 1);
    return 2.2 * norms[idx];
}

std::vector<double> default_lambda_b_grid(const Eigen::MatrixXd& factors, const PanelData& panel,
                                          int points) {
    const int r = static_cast<int>(factors.cols());
    // residual after the unpenalized exposure block alone
    const Eigen::MatrixXd xc = factors.array().colwise() * panel.x.array();
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += 1e-8;
    const Eigen::VectorXd resid = panel.y - xc * gram.ldlt().solve(xc.transpose() * panel.y);
    double bound = 0.0;
    for (int k = 0; k < panel.p; ++k) {
        const Eigen::MatrixXd xk = factors.array().colwise() * panel.m.col(k).array();
        bound = std::max(bound, 2.0 * (xk.transpose() * resid).norm());
    }
    if (bound <= 0.0) bound = 1.0;
    std::vector<double> grid(points);
    for (int j = 0; j < points; ++j)
        grid[j] = bound * std::pow(0.005, 1.0 - j / (points - 1.0));
    return grid;
}

std::pair<double, std::vector<double>> select_lambda_b_cv(const Eigen::MatrixXd& factors,
                                                          const PanelData& panel,
                                                          const std::vector<double>& lambda_grid,
                                                          int folds, std::uint64_t seed,
                                                          double scad_a, int lla_rounds) {
    if (lambda_grid.empty()) throw Error("select_lambda_b_cv: empty grid");
    if (folds < 2) throw Error("select_lambda_b_cv: folds must be >= 2");
    folds = std::min(folds, panel.n);

    // shuffle individuals, deal them round-robin into folds
    std::vector<int> order(panel.n);
    std::iota(order.begin(), order.end(), 0);
    RngStream rng(seed, streams::kCvFolds);
    for (int i = panel.n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(i + 1)]);
    std::vector<std::vector<int>> fold_ids(folds);
    for (int i = 0; i < panel.n; ++i) fold_ids[i % folds].push_back(order[i]);
    for (auto& f : fold_ids) std::sort(f.begin(), f.end());

    const int T = panel.T;
    std::vector<double> curve(lambda_grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        std::vector<int> train;
        for (int g = 0; g < folds; ++g)
            if (g != f) train.insert(train.end(), fold_ids[g].begin(), fold_ids[g].end());
        std::sort(train.begin(), train.end());

        const PanelData train_panel = subset_individuals(panel, train);
        Eigen::MatrixXd train_factors(train_panel.rows(), factors.cols());
        for (std::size_t j = 0; j < train.size(); ++j)
            train_factors.middleRows(static_cast<int>(j) * T, T) =
                factors.middleRows(train[j] * T, T);

        const PanelData test_panel = subset_individuals(panel, fold_ids[f]);
        Eigen::MatrixXd test_factors(test_panel.rows(), factors.cols());
        for (std::size_t j = 0; j < fold_ids[f].size(); ++j)
            test_factors.middleRows(static_cast<int>(j) * T, T) =
                factors.middleRows(fold_ids[f][j] * T, T);

        for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
            auto [loading_b, loading_c] =
                fit_outcome(train_factors, train_panel, lambda_grid[li], scad_a, 1e-8, lla_rounds);
            const Eigen::VectorXd theta = test_factors * loading_c;
            const Eigen::MatrixXd beta = test_factors * loading_b.transpose();
            curve[li] += loss_outcome(theta, beta, test_panel);
        }
    }
    for (auto& v : curve) v /= panel.rows();

    std::size_t best = 0;
    for (std::size_t li = 1; li < curve.size(); ++li) {
        // ties toward the larger lambda (sparser model)
        if (curve[li] < curve[best] ||
            (curve[li] == curve[best] && lambda_grid[li] > lambda_grid[best]))
            best = li;
    }
    return {lambda_grid[best], curve};
}

double bic_score(double loss_m, double loss_y, int df_f, int df_b, int n, int T, int p, int r,
                 double c1, double c2) {
    if (!(loss_m > 0.0) || !(loss_y > 0.0))
        throw NonPositiveLoss("bic_score: losses must be positive");
    const double nt = static_cast<double>(n) * T;
    const double c_n = c1 * std::log(std::log(nt)) * std::log(static_cast<double>(p)) / nt;
    const double d_n = c2 * std::log(std::log(nt)) / nt;
    return std::log(loss_m / nt) + std::log(loss_y / nt) + c_n * r * df_f + d_n * r * df_b;
}

std::pair<Hyperparams, BicReport> tune_bic(const PanelData& panel, const TuneGrid& grid,
                                           const Hyperparams& base_hyper) {
    if (grid.lambda_f_grid.empty() || grid.c_f_grid.empty())
        throw Error("tune_bic: grids must be nonempty");
    validate_hyperparams(base_hyper);
    validate_panel(panel);

    const InitFactorization init = init_factorization_auto(panel, base_hyper);
    const double pilot =
        grid.lambda_f_from_pilot ? pilot_lambda_f_scale(init.loading_a, panel) : 1.0;

    BicReport report;
    double best_score = std::numeric_limits<double>::infinity();
    for (double lf_mult : grid.lambda_f_grid) {
        for (int cf : grid.c_f_grid) {
            BicCandidate cand;
            cand.lambda_f = grid.lambda_f_from_pilot ? lf_mult * pilot : lf_mult;
            cand.c_f = cf;
            try {
                Hyperparams hyper = base_hyper;
                hyper.lambda_f = cand.lambda_f;
                hyper.c_f = cf;
                const IdmaFit fit = fit_idma_with_init(panel, hyper, init);
                cand.loss_m = fit.loss_m;
                cand.loss_y = fit.loss_y;
                cand.df_f = count_distinct_rows(fit.factor_model.factors);
                cand.df_b = static_cast<int>(fit.selected.size());
                cand.score = bic_score(cand.loss_m, cand.loss_y, cand.df_f, cand.df_b, panel.n,
                                       panel.T, panel.p, init.rank, grid.bic_c1, grid.bic_c2);
            } catch (const std::exception& e) {
                cand.failed = true;
                cand.error = e.what();
            }
            report.candidates.push_back(cand);
            if (!cand.failed) {
                const bool better =
                    cand.score < best_score ||
                    (cand.score == best_score && report.best_index >= 0 &&
                     (cand.lambda_f > report.candidates[report.best_index].lambda_f ||
                      (cand.lambda_f == report.candidates[report.best_index].lambda_f &&
                       cand.c_f < report.candidates[report.best_index].c_f)));
                if (better || report.best_index < 0) {
                    best_score = std::min(best_score, cand.score);
                    report.best_index = static_cast<int>(report.candidates.size()) - 1;
                }
            }
        }
    }
    if (report.best_index < 0) throw Error("tune_bic: every candidate failed");

    Hyperparams chosen = base_hyper;
    chosen.lambda_f = report.candidates[report.best_index].lambda_f;
    chosen.c_f = report.candidates[report.best_index].c_f;
    chosen.lambda_r = init.lambda_r;
    chosen.rank = init.rank;
    return {chosen, report};
}

int estimate_rank(const Eigen::VectorXd& singular_values, int max_rank) {
    if (max_rank < 1) throw Error("estimate_rank: max_rank must be positive");
    if (singular_values.size() < max_rank + 1)
        throw DimensionMismatch("estimate_rank: need at least max_rank + 1 singular values");
    const double top = singular_values[0];
    if (!(top > 0.0)) return 1;
    const double floor = 1e-12 * top;
    int best = 1;
    double best_ratio = 0.0;
    for (int j = 1; j <= max_rank; ++j) {
        const double ratio = singular_values[j - 1] / std::max(singular_values[j], floor);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = j;
        }
    }
    return best;
}

}  // namespace idma
