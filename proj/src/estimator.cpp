#include "idma/estimator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "idma/errors.hpp"
#include "idma/fpc.hpp"
#include "idma/genlasso.hpp"
#include "idma/group_scad.hpp"
#include "idma/kmeans.hpp"
#include "idma/linalg.hpp"
#include "idma/losses.hpp"
#include "idma/tuning.hpp"

namespace idma {

SplitPlan make_split_plan(int n, int held_out, RngStream rng) {
    SplitPlan plan;
    plan.held_out = held_out;
    std::vector<int> pool;
    pool.reserve(n);
    for (int i = 0; i < n; ++i)
        if (i != held_out) pool.push_back(i);
    // Fisher-Yates with the deterministic stream
    for (int i = static_cast<int>(pool.size()) - 1; i > 0; --i)
        std::swap(pool[i], pool[rng.uniform_int(i + 1)]);
    const int half = static_cast<int>((pool.size() + 1) / 2);
    plan.part_a.assign(pool.begin(), pool.begin() + half);
    plan.part_b.assign(pool.begin() + half, pool.end());
    std::sort(plan.part_a.begin(), plan.part_a.end());
    std::sort(plan.part_b.begin(), plan.part_b.end());
    return plan;
}

namespace {

// mediator-model FPC solve: loss ||M - x (*) A||_F^2, diagonal curvature 2x^2
FpcResult fpc_mediator(const PanelData& panel, double lambda_r, double tol, int max_iter) {
    const auto oracle = [&panel](const Eigen::MatrixXd& a, Eigen::MatrixXd& grad) {
        const Eigen::ArrayXXd resid =
            a.array().colwise() * panel.x.array() - panel.m.array();
        grad = (2.0 * (resid.colwise() * panel.x.array())).matrix();
        return resid.matrix().squaredNorm();
    };
    const double lip = 2.0 * panel.x.array().square().maxCoeff();
    return fpc_nuclear(oracle, lip, lambda_r,
                       Eigen::MatrixXd::Zero(panel.rows(), panel.p), tol, max_iter);
}

InitFactorization decompose_init(const Eigen::MatrixXd& a_tilde, double lambda_r, int rank,
                                 bool fpc_converged) {
    const int kmax = static_cast<int>(std::min(a_tilde.rows(), a_tilde.cols()));
    if (rank > kmax)
        throw RankTooLarge("init_factorization: rank exceeds min(nT, p)");
    ThinSvd svd = thin_svd(a_tilde, kmax);
    InitFactorization init;
    init.spectrum = svd.d;
    init.factors = svd.u.leftCols(rank) * svd.d.head(rank).asDiagonal();
    init.loading_a = svd.v.leftCols(rank);
    init.lambda_r = lambda_r;
    init.rank = rank;
    init.fpc_converged = fpc_converged;
    return init;
}

// per-time pooled ridge least squares; also the LLA initializer of the fused update
Eigen::MatrixXd per_time_ls_path(const Eigen::MatrixXd& loading_a, const PanelData& panel,
                                 const std::vector<int>& ids) {
    const int r = static_cast<int>(loading_a.cols());
    const Eigen::MatrixXd ata = loading_a.transpose() * loading_a;
    Eigen::MatrixXd path(panel.T, r);
    for (int t = 0; t < panel.T; ++t) {
        double sx2 = 0.0;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
        for (int i : ids) {
            const int row = panel.row(i, t);
            sx2 += panel.x[row] * panel.x[row];
            rhs.noalias() += panel.x[row] * (loading_a.transpose() * panel.m.row(row).transpose());
        }
        Eigen::MatrixXd g = sx2 * ata;
        g.diagonal().array() += 1e-8;
        path.row(t) = g.ldlt().solve(rhs).transpose();
    }
    return path;
}

double fused_penalty(const Eigen::MatrixXd& path, double lambda_f, double scad_a) {
    double pen = 0.0;
    for (int t = 1; t < path.rows(); ++t)
        for (int j = 0; j < path.cols(); ++j)
            pen += scad_value(std::abs(path(t, j) - path(t - 1, j)), lambda_f, scad_a);
    return pen;
}

}  // namespace

InitFactorization init_factorization(const PanelData& panel, double lambda_r, int rank,
                                     double tol, int max_iter) {
    FpcResult fpc = fpc_mediator(panel, lambda_r, tol, max_iter);
    return decompose_init(fpc.a, lambda_r, rank, fpc.converged);
}

InitFactorization init_factorization_auto(const PanelData& panel, const Hyperparams& hyper) {
    double lambda_r;
    if (hyper.lambda_r) {
        lambda_r = *hyper.lambda_r;
    } else {
        const double sigma2 = estimate_noise_variance(panel);
        lambda_r = select_lambda_r(panel, sigma2, 200, hyper.seed);
    }
    FpcResult fpc = fpc_mediator(panel, lambda_r, hyper.tol, hyper.max_iter);
    int rank;
    if (hyper.rank) {
        rank = *hyper.rank;
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(fpc.a);
        const Eigen::VectorXd spectrum = svd.singularValues();
        const int max_rank = std::min<int>(8, static_cast<int>(spectrum.size()) - 1);
        rank = max_rank >= 1 ? estimate_rank(spectrum, max_rank) : 1;
    }
    return decompose_init(fpc.a, lambda_r, rank, fpc.converged);
}

Eigen::MatrixXd update_factors_fused(const Eigen::MatrixXd& loading_a, const PanelData& panel,
                                     const std::vector<int>& individuals, double lambda_f,
                                     double scad_a, int lla_rounds, double tol) {
    const int r = static_cast<int>(loading_a.cols());
    const int T = panel.T;
    const int p = panel.p;
    if (loading_a.rows() != p)
        throw DimensionMismatch("update_factors_fused: loading_a must be p x r");
    if (individuals.empty()) throw Error("update_factors_fused: empty individual set");

    GenLassoProblem prob;
    prob.design.setZero(static_cast<int>(individuals.size()) * T * p, T * r);
    prob.response.resize(prob.design.rows());
    int block = 0;
    for (int i : individuals) {
        for (int t = 0; t < T; ++t, ++block) {
            const int row = panel.row(i, t);
            prob.design.block(block * p, t * r, p, r) = panel.x[row] * loading_a;
            prob.response.segment(block * p, p) = panel.m.row(row).transpose();
        }
    }
    prob.diff_op.setZero((T - 1) * r, T * r);
    for (int t = 0; t + 1 < T; ++t)
        for (int j = 0; j < r; ++j) {
            prob.diff_op(t * r + j, t * r + j) = -1.0;
            prob.diff_op(t * r + j, (t + 1) * r + j) = 1.0;
        }
    prob.weights.resize((T - 1) * r);

    Eigen::MatrixXd path(T, r);
    if (T == 1 || lambda_f == 0.0) {
        // penalty vacuous: exact (pseudo-inverse) per-time least squares
        prob.weights.setZero();
        const Eigen::VectorXd f = solve_generalized_lasso(prob, tol);
        for (int t = 0; t < T; ++t) path.row(t) = f.segment(t * r, r).transpose();
        return path;
    }

    path = per_time_ls_path(loading_a, panel, individuals);
    Eigen::VectorXd f(T * r);
    for (int t = 0; t < T; ++t) f.segment(t * r, r) = path.row(t).transpose();

    for (int round = 0; round < lla_rounds; ++round) {
        const Eigen::VectorXd diffs = prob.diff_op * f;
        for (int e = 0; e < diffs.size(); ++e)
            prob.weights[e] = 0.5 * scad_derivative(std::abs(diffs[e]), lambda_f, scad_a);
        const Eigen::VectorXd next = solve_generalized_lasso(prob, tol);
        const double change = (next - f).lpNorm<Eigen::Infinity>();
        f = next;
        if (change < 1e-12) break;
    }
    for (int t = 0; t < T; ++t) path.row(t) = f.segment(t * r, r).transpose();
    return path;
}

Eigen::MatrixXd update_loadings(const Eigen::MatrixXd& factors, const PanelData& panel) {
    if (factors.rows() != panel.rows())
        throw DimensionMismatch("update_loadings: factors must have n*T rows");
    const Eigen::MatrixXd w = factors.array().colwise() * panel.x.array();
    Eigen::MatrixXd gram = w.transpose() * w;
    gram.diagonal().array() += 1e-8;
    const Eigen::MatrixXd rhs = w.transpose() * panel.m;  // r x p
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::MatrixXd loading_a = ldlt.solve(rhs).transpose();
    if (ldlt.info() != Eigen::Success || !loading_a.allFinite())
        throw SingularDesign("update_loadings: normal equations are singular");
    return loading_a;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> fit_outcome(const Eigen::MatrixXd& factors,
                                                        const PanelData& panel, double lambda_b,
                                                        double scad_a, double tol,
                                                        int lla_rounds) {
    if (factors.rows() != panel.rows())
        throw DimensionMismatch("fit_outcome: factors must have n*T rows");
    const int r = static_cast<int>(factors.cols());
    const int p = panel.p;

    GroupedDesign blocks;
    blocks.design.resize(panel.rows(), (p + 1) * r);
    blocks.design.leftCols(r) = factors.array().colwise() * panel.x.array();
    for (int k = 0; k < p; ++k)
        blocks.design.middleCols((k + 1) * r, r) =
            factors.array().colwise() * panel.m.col(k).array();
    blocks.starts.resize(p + 2);
    for (int k = 0; k <= p + 1; ++k) blocks.starts[k] = k * r;
    blocks.penalized.assign(p + 1, true);
    blocks.penalized[0] = false;

    GroupScadResult res =
        group_scad_regression(blocks, panel.y, lambda_b, scad_a, tol, lla_rounds);

    Eigen::VectorXd loading_c = res.coef.head(r);
    Eigen::MatrixXd loading_b(p, r);
    for (int k = 0; k < p; ++k)
        loading_b.row(k) = res.coef.segment((k + 1) * r, r).transpose();
    return {std::move(loading_b), std::move(loading_c)};
}

Eigen::MatrixXd threshold_b(const Eigen::MatrixXd& loading_b) {
    const int p = static_cast<int>(loading_b.rows());
    if (p < 2) throw DimensionMismatch("threshold_b requires p >= 2");
    Eigen::VectorXd norms = loading_b.rowwise().norm();
    const double mean = norms.mean();
    const double sd = std::sqrt((norms.array() - mean).square().sum() / (p - 1));
    const double se = sd / std::sqrt(static_cast<double>(p));
    const double cutoff = mean + 0.5 * se;
    Eigen::MatrixXd out = loading_b;
    for (int k = 0; k < p; ++k)
        if (norms[k] < cutoff) out.row(k).setZero();
    return out;
}

std::vector<int> kmeans_subgroup_factors(const Eigen::MatrixXd& factors, int n, int T, int c_f,
                                         RngStream rng) {
    if (factors.rows() != static_cast<Eigen::Index>(n) * T)
        throw DimensionMismatch("kmeans_subgroup_factors: factors must have n*T rows");
    if (c_f > n) throw Error("kmeans_subgroup_factors: c_f must not exceed n");
    const int r = static_cast<int>(factors.cols());
    Eigen::MatrixXd traj(n, T * r);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < T; ++t)
            traj.block(i, t * r, 1, r) = factors.row(i * T + t);
    return kmeans(traj, c_f, rng);
}

namespace {

struct HalfFit {
    FactorModel fm;  // factors for all individuals, loadings refit on refit set
    double lambda_f_used = 0.0, lambda_b_used = 0.0;
    bool outcome_converged = true;
    std::vector<int> subgroup;
    double loss_m_init = 0.0;
    double fused_penalty_init = 0.0;
};

std::vector<int> all_ids(int n) {
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

// steps 3-5 of the estimation procedure given an initialization
HalfFit run_pipeline(const PanelData& panel, const Hyperparams& hyper,
                     const InitFactorization& init, const std::vector<int>& refit_ids,
                     int half_index) {
    const int n = panel.n, T = panel.T, r = init.rank;
    HalfFit out;

    Eigen::MatrixXd loadings = init.loading_a;
    Eigen::MatrixXd factors(panel.rows(), r);

    // pilot scale and initialization diagnostics from per-time LS paths
    std::vector<double> abs_diffs;
    std::vector<Eigen::MatrixXd> ls_paths(n);
    for (int i = 0; i < n; ++i) {
        ls_paths[i] = per_time_ls_path(loadings, panel, {i});
        for (int t = 1; t < T; ++t)
            for (int j = 0; j < r; ++j)
                abs_diffs.push_back(std::abs(ls_paths[i](t, j) - ls_paths[i](t - 1, j)));
    }
    double lambda_f;
    if (hyper.lambda_f) {
        lambda_f = *hyper.lambda_f;
    } else if (abs_diffs.empty()) {
        lambda_f = 0.0;
    } else {
        std::nth_element(abs_diffs.begin(), abs_diffs.begin() + abs_diffs.size() / 2,
                         abs_diffs.end());
        lambda_f = abs_diffs[abs_diffs.size() / 2];
    }
    out.lambda_f_used = lambda_f;
    for (int i = 0; i < n; ++i)
        out.fused_penalty_init += fused_penalty(ls_paths[i], lambda_f, hyper.scad_a);

    try {
        for (int round = 0; round < hyper.alt_rounds; ++round) {
            for (int i = 0; i < n; ++i) {
                const Eigen::MatrixXd path = update_factors_fused(
                    loadings, panel, {i}, lambda_f, hyper.scad_a, hyper.lla_rounds, hyper.tol);
                factors.middleRows(i * T, T) = path;
            }
            if (hyper.c_f >= 1) {
                RngStream rng = RngStream(hyper.seed, streams::kKmeans)
                                    .substream(static_cast<std::uint64_t>(half_index) * 97 + round);
                out.subgroup = kmeans_subgroup_factors(factors, n, T, hyper.c_f, rng);
                for (int c = 0; c < hyper.c_f; ++c) {
                    std::vector<int> members;
                    for (int i = 0; i < n; ++i)
                        if (out.subgroup[i] == c) members.push_back(i);
                    if (members.empty()) continue;
                    const Eigen::MatrixXd shared = update_factors_fused(
                        loadings, panel, members, lambda_f, hyper.scad_a, hyper.lla_rounds,
                        hyper.tol);
                    for (int i : members) factors.middleRows(i * T, T) = shared;
                }
            }
            const PanelData refit_panel = subset_individuals(panel, refit_ids);
            Eigen::MatrixXd refit_factors(refit_panel.rows(), r);
            for (std::size_t j = 0; j < refit_ids.size(); ++j)
                refit_factors.middleRows(static_cast<int>(j) * T, T) =
                    factors.middleRows(refit_ids[j] * T, T);
            loadings = update_loadings(refit_factors, refit_panel);
        }
    } catch (const Error& e) {
        throw StageError("factor-update", e.what());
    }

    const PanelData refit_panel = subset_individuals(panel, refit_ids);
    Eigen::MatrixXd refit_factors(refit_panel.rows(), r);
    for (std::size_t j = 0; j < refit_ids.size(); ++j)
        refit_factors.middleRows(static_cast<int>(j) * T, T) =
            factors.middleRows(refit_ids[j] * T, T);

    // monotone-pipeline diagnostic; only meaningful when the initialization
    // covers the whole panel (full-sample mode)
    if (init.factors.rows() == panel.rows())
        out.loss_m_init =
            loss_mediator(init.factors * init.loading_a.transpose(), panel);

    double lambda_b;
    try {
        if (hyper.lambda_b) {
            lambda_b = *hyper.lambda_b;
        } else {
            const auto grid = default_lambda_b_grid(refit_factors, refit_panel);
            RngStream rng = RngStream(hyper.seed, streams::kCvFolds).substream(half_index);
            lambda_b = select_lambda_b_cv(refit_factors, refit_panel, grid, 5, rng.next_u64(),
                                          hyper.scad_a, hyper.lla_rounds)
                           .first;
        }
        out.lambda_b_used = lambda_b;

        auto [loading_b, loading_c] = fit_outcome(refit_factors, refit_panel, lambda_b,
                                                  hyper.scad_a, 1e-8, hyper.lla_rounds);
        if (panel.p >= 2) loading_b = threshold_b(loading_b);
        out.fm.r = r;
        out.fm.factors = std::move(factors);
        out.fm.loading_a = loadings;
        out.fm.loading_b = std::move(loading_b);
        out.fm.loading_c = std::move(loading_c);
    } catch (const Error& e) {
        throw StageError("outcome-fit", e.what());
    }
    return out;
}

std::vector<int> selected_from_loadings(const Eigen::MatrixXd& loading_b) {
    std::vector<int> sel;
    for (int k = 0; k < loading_b.rows(); ++k)
        if (!loading_b.row(k).isZero(0.0)) sel.push_back(k);
    return sel;
}

void finalize_fit(IdmaFit& fit, const PanelData& panel) {
    fit.selected = selected_from_loadings(fit.factor_model.loading_b);
    fit.loss_m = loss_mediator(fit.coefficients.alpha, panel);
    fit.loss_y = loss_outcome(fit.coefficients.theta, fit.coefficients.beta, panel);
    fit.distinct_factor_rows.resize(panel.n);
    for (int i = 0; i < panel.n; ++i)
        fit.distinct_factor_rows[i] =
            count_distinct_rows(fit.factor_model.factors.middleRows(i * panel.T, panel.T));
}

}  // namespace

IdmaFit fit_idma_with_init(const PanelData& panel, const Hyperparams& hyper,
                           const InitFactorization& init) {
    validate_hyperparams(hyper);
    validate_panel(panel);

    const auto ids = all_ids(panel.n);
    HalfFit half = run_pipeline(panel, hyper, init, ids, 0);

    IdmaFit fit;
    fit.factor_model = half.fm;
    fit.coefficients = assemble_coefficients(half.fm);
    fit.singular_values = init.spectrum;
    fit.fpc_converged = init.fpc_converged;
    fit.lambda_r_used = init.lambda_r;
    fit.lambda_f_used = half.lambda_f_used;
    fit.lambda_b_used = half.lambda_b_used;
    fit.rank_used = init.rank;
    fit.subgroup = half.subgroup;
    fit.loss_m_init = half.loss_m_init;
    fit.fused_penalty_init = half.fused_penalty_init;
    finalize_fit(fit, panel);
    return fit;
}

IdmaFit fit_idma(const PanelData& panel, const Hyperparams& hyper) {
    validate_hyperparams(hyper);
    validate_panel(panel);

    PanelData work = panel;
    if (hyper.standardize) work = standardize(panel).first;

    if (!hyper.crossfit) {
        InitFactorization init;
        try {
            init = init_factorization_auto(work, hyper);
        } catch (const Error& e) {
            throw StageError("init-factorization", e.what());
        }
        return fit_idma_with_init(work, hyper, init);
    }

    // cross-fit: one random split shared across all individuals; each half
    // initializes on its part and refits loadings on the complement, then the
    // coefficient tensors are averaged
    SplitPlan plan = make_split_plan(work.n, -1, RngStream(hyper.seed, streams::kSplit));

    auto run_for = [&](const std::vector<int>& init_ids, const std::vector<int>& refit_ids,
                       int half_index) {
        InitFactorization init;
        try {
            init = init_factorization_auto(subset_individuals(work, init_ids), hyper);
        } catch (const Error& e) {
            throw StageError("init-factorization", e.what());
        }
        return std::make_pair(run_pipeline(work, hyper, init, refit_ids, half_index), init);
    };
    auto [half_a, init_a] = run_for(plan.part_a, plan.part_b, 1);
    auto [half_b, init_b] = run_for(plan.part_b, plan.part_a, 2);

    const CoefficientField cf_a = assemble_coefficients(half_a.fm);
    const CoefficientField cf_b = assemble_coefficients(half_b.fm);

    IdmaFit fit;
    fit.coefficients =
        assemble_coefficients(0.5 * (cf_a.alpha + cf_b.alpha), 0.5 * (cf_a.beta + cf_b.beta),
                              0.5 * (cf_a.theta + cf_b.theta));

    // stacked factor model reproducing the averaged coefficients
    const int ra = half_a.fm.r, rb = half_b.fm.r;
    fit.factor_model.r = ra + rb;
    fit.factor_model.factors.resize(work.rows(), ra + rb);
    fit.factor_model.factors << half_a.fm.factors, half_b.fm.factors;
    fit.factor_model.loading_a.resize(work.p, ra + rb);
    fit.factor_model.loading_a << 0.5 * half_a.fm.loading_a, 0.5 * half_b.fm.loading_a;
    fit.factor_model.loading_b.resize(work.p, ra + rb);
    fit.factor_model.loading_b << 0.5 * half_a.fm.loading_b, 0.5 * half_b.fm.loading_b;
    fit.factor_model.loading_c.resize(ra + rb);
    fit.factor_model.loading_c << 0.5 * half_a.fm.loading_c, 0.5 * half_b.fm.loading_c;

    fit.singular_values = init_a.spectrum;
    fit.fpc_converged = init_a.fpc_converged && init_b.fpc_converged;
    fit.lambda_r_used = init_a.lambda_r;
    fit.lambda_f_used = half_a.lambda_f_used;
    fit.lambda_b_used = half_a.lambda_b_used;
    fit.rank_used = init_a.rank;
    fit.subgroup = half_a.subgroup;
    finalize_fit(fit, work);
    return fit;
}

CoefficientField mediation_effects(const IdmaFit& fit) {
    return assemble_coefficients(fit.factor_model);
}

}  // namespace idma
