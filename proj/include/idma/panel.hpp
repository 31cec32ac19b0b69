#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace idma {

/**
 * Balanced longitudinal panel: n individuals, T time points each.
 *
 * Observations are stacked row-major by (individual, time): row(i,t) = i*T + t.
 * This matches the nT x p layout used throughout the low-rank algebra.
 */
struct PanelData {
    int n = 0;  ///< individuals
    int T = 0;  ///< time points per individual
    int p = 0;  ///< mediators
    int q = 0;  ///< observed covariates (0 = none)

    Eigen::VectorXd y;  ///< outcome, length nT
    Eigen::MatrixXd m;  ///< mediators, nT x p
    Eigen::VectorXd x;  ///< exposure, length nT
    Eigen::MatrixXd z;  ///< covariates, nT x q (0 columns when q = 0)

    int rows() const { return n * T; }
    int row(int i, int t) const { return i * T + t; }
};

/// Pooled means/sds recorded by standardize(); sufficient to invert it.
struct ScalingRecord {
    double y_mean = 0.0, y_sd = 1.0;
    Eigen::VectorXd m_means, m_sds;  // length p
    double x_mean = 0.0, x_sd = 1.0;
};

/// Regression of each removed column on [1, z], kept for reporting.
struct ProjectionRecord {
    Eigen::VectorXd y_coef;  // q+1
    Eigen::MatrixXd m_coef;  // (q+1) x p
    Eigen::VectorXd x_coef;  // q+1
};

/// Checks dimensions, finiteness, and exposure identifiability.
/// Returns the input unchanged when all invariants hold.
const PanelData& validate_panel(const PanelData& raw);

/// Projects y, x, and each mediator column onto the orthogonal complement of
/// [1, z] pooled over all (i,t); the returned panel has q = 0.
std::pair<PanelData, ProjectionRecord> residualize_on_covariates(const PanelData& panel);

/// Centers and scales y, x, and each mediator column to pooled mean 0, sd 1.
std::pair<PanelData, ScalingRecord> standardize(const PanelData& panel);

/// Inverse of standardize() given its record.
PanelData unstandardize(const PanelData& panel, const ScalingRecord& record);

/// Row subset of a panel by individual indices (keeps all T rows per kept i).
PanelData subset_individuals(const PanelData& panel, const std::vector<int>& ids);

}  // namespace idma
