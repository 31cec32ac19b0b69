#include "idma/panel.hpp"

#include <Eigen/QR>
#include <cmath>
#include <string>
#include <vector>

#include "idma/errors.hpp"

namespace idma {

const PanelData& validate_panel(const PanelData& raw) {
    if (raw.n < 2 || raw.T < 1 || raw.p < 1)
        throw DimensionMismatch("panel requires n >= 2, T >= 1, p >= 1; got n=" +
                                std::to_string(raw.n) + " T=" + std::to_string(raw.T) +
                                " p=" + std::to_string(raw.p));
    const int nt = raw.rows();
    if (raw.y.size() != nt) throw DimensionMismatch("y must have n*T entries");
    if (raw.x.size() != nt) throw DimensionMismatch("x must have n*T entries");
    if (raw.m.rows() != nt || raw.m.cols() != raw.p)
        throw DimensionMismatch("m must be (n*T) x p");
    if (raw.q > 0 && (raw.z.rows() != nt || raw.z.cols() != raw.q))
        throw DimensionMismatch("z must be (n*T) x q");
    if (raw.q == 0 && raw.z.size() != 0)
        throw DimensionMismatch("z must be empty when q = 0");

    if (!raw.y.allFinite()) throw NonFinite("y contains NaN or Inf");
    if (!raw.x.allFinite()) throw NonFinite("x contains NaN or Inf");
    if (!raw.m.allFinite()) throw NonFinite("m contains NaN or Inf");
    if (raw.q > 0 && !raw.z.allFinite()) throw NonFinite("z contains NaN or Inf");

    for (int i = 0; i < raw.n; ++i) {
        bool all_zero = true;
        for (int t = 0; t < raw.T; ++t)
            if (raw.x[raw.row(i, t)] != 0.0) { all_zero = false; break; }
        if (all_zero)
            throw DegenerateExposure("individual " + std::to_string(i) +
                                     " has zero exposure at every time point");
    }
    return raw;
}

std::pair<PanelData, ProjectionRecord> residualize_on_covariates(const PanelData& panel) {
    validate_panel(panel);
    if (panel.q < 1) throw DimensionMismatch("residualize_on_covariates requires q >= 1");

    const int nt = panel.rows();
    Eigen::MatrixXd design(nt, panel.q + 1);
    design.col(0).setOnes();
    design.rightCols(panel.q) = panel.z;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols())
        throw RankDeficientCovariates("pooled design [1, z] is rank deficient (rank " +
                                      std::to_string(qr.rank()) + " of " +
                                      std::to_string(design.cols()) + ")");

    ProjectionRecord rec;
    rec.y_coef = qr.solve(panel.y);
    rec.x_coef = qr.solve(panel.x);
    rec.m_coef = qr.solve(panel.m);

    PanelData out = panel;
    out.y -= design * rec.y_coef;
    out.x -= design * rec.x_coef;
    out.m -= design * rec.m_coef;
    out.q = 0;
    out.z.resize(0, 0);
    validate_panel(out);  // exposure can degenerate after projection
    return {std::move(out), std::move(rec)};
}

namespace {

// pooled mean/sd over all (i,t), sample sd with n-1 denominator
std::pair<double, double> column_moments(const Eigen::VectorXd& v) {
    const double mean = v.mean();
    const double ss = (v.array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return {mean, sd};
}

}  // namespace

std::pair<PanelData, ScalingRecord> standardize(const PanelData& panel) {
    validate_panel(panel);
    ScalingRecord rec;
    rec.m_means.resize(panel.p);
    rec.m_sds.resize(panel.p);

    auto scale_or_throw = [](double sd, const std::string& what) {
        if (!(sd > 0.0)) throw ZeroVariance(what + " has zero pooled variance");
        return sd;
    };

    PanelData out = panel;
    std::tie(rec.y_mean, rec.y_sd) = column_moments(panel.y);
    scale_or_throw(rec.y_sd, "y");
    out.y = (panel.y.array() - rec.y_mean) / rec.y_sd;

    std::tie(rec.x_mean, rec.x_sd) = column_moments(panel.x);
    scale_or_throw(rec.x_sd, "x");
    out.x = (panel.x.array() - rec.x_mean) / rec.x_sd;

    for (int k = 0; k < panel.p; ++k) {
        auto [mu, sd] = column_moments(panel.m.col(k));
        scale_or_throw(sd, "mediator column " + std::to_string(k));
        rec.m_means[k] = mu;
        rec.m_sds[k] = sd;
        out.m.col(k) = (panel.m.col(k).array() - mu) / sd;
    }
    return {std::move(out), std::move(rec)};
}

PanelData unstandardize(const PanelData& panel, const ScalingRecord& record) {
    PanelData out = panel;
    out.y = panel.y.array() * record.y_sd + record.y_mean;
    out.x = panel.x.array() * record.x_sd + record.x_mean;
    for (int k = 0; k < panel.p; ++k)
        out.m.col(k) = panel.m.col(k).array() * record.m_sds[k] + record.m_means[k];
    return out;
}

PanelData subset_individuals(const PanelData& panel, const std::vector<int>& ids) {
    PanelData out;
    out.n = static_cast<int>(ids.size());
    out.T = panel.T;
    out.p = panel.p;
    out.q = panel.q;
    out.y.resize(out.rows());
    out.x.resize(out.rows());
    out.m.resize(out.rows(), panel.p);
    if (panel.q > 0) out.z.resize(out.rows(), panel.q);
    for (int j = 0; j < out.n; ++j) {
        const int src = ids[j] * panel.T;
        const int dst = j * panel.T;
        out.y.segment(dst, panel.T) = panel.y.segment(src, panel.T);
        out.x.segment(dst, panel.T) = panel.x.segment(src, panel.T);
        out.m.middleRows(dst, panel.T) = panel.m.middleRows(src, panel.T);
        if (panel.q > 0) out.z.middleRows(dst, panel.T) = panel.z.middleRows(src, panel.T);
    }
    return out;
}

}  // namespace idma
