#include "idma/model.hpp"

#include <cmath>
#include <string>

#include "idma/errors.hpp"

namespace idma {

CoefficientField assemble_coefficients(const FactorModel& fm) {
    return assemble_coefficients(fm.factors * fm.loading_a.transpose(),
                                 fm.factors * fm.loading_b.transpose(),
                                 fm.factors * fm.loading_c);
}

CoefficientField assemble_coefficients(Eigen::MatrixXd alpha, Eigen::MatrixXd beta,
                                       Eigen::VectorXd theta) {
    if (alpha.rows() != beta.rows() || alpha.cols() != beta.cols() ||
        theta.size() != alpha.rows())
        throw DimensionMismatch("assemble_coefficients: alpha/beta/theta shapes disagree");
    CoefficientField cf;
    cf.gamma = alpha.cwiseProduct(beta);
    cf.gamma_total = cf.gamma.rowwise().sum();
    cf.alpha = std::move(alpha);
    cf.beta = std::move(beta);
    cf.theta = std::move(theta);
    return cf;
}

void validate_hyperparams(const Hyperparams& h) {
    auto nonneg = [](const std::optional<double>& v, const char* name) {
        if (v && (!(*v >= 0.0) || !std::isfinite(*v)))
            throw InvalidHyperparams(std::string(name) + " must be a finite nonnegative real");
    };
    nonneg(h.lambda_r, "lambda_r");
    nonneg(h.lambda_f, "lambda_f");
    nonneg(h.lambda_b, "lambda_b");
    if (h.rank && *h.rank < 1) throw InvalidHyperparams("rank must be positive");
    if (h.c_f < 0) throw InvalidHyperparams("c_f must be nonnegative");
    if (!(h.scad_a > 2.0)) throw InvalidHyperparams("scad_a must exceed 2");
    if (!(h.tol > 0.0)) throw InvalidHyperparams("tol must be positive");
    if (h.max_iter < 1) throw InvalidHyperparams("max_iter must be positive");
    if (h.lla_rounds < 1) throw InvalidHyperparams("lla_rounds must be positive");
    if (h.alt_rounds < 1) throw InvalidHyperparams("alt_rounds must be positive");
}

}  // namespace idma
