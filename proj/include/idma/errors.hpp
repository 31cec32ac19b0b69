#pragma once

#include <stdexcept>
#include <string>

namespace idma {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct NonFinite : Error {
    explicit NonFinite(const std::string& msg) : Error(msg) {}
};

/// Some individual has x_it == 0 for every t; its exposure coefficients
/// cannot be identified from the mediator model.
struct DegenerateExposure : Error {
    explicit DegenerateExposure(const std::string& msg) : Error(msg) {}
};

struct RankDeficientCovariates : Error {
    explicit RankDeficientCovariates(const std::string& msg) : Error(msg) {}
};

struct ZeroVariance : Error {
    explicit ZeroVariance(const std::string& msg) : Error(msg) {}
};

struct InvalidScadShape : Error {
    explicit InvalidScadShape(const std::string& msg) : Error(msg) {}
};

struct SolverDiverged : Error {
    explicit SolverDiverged(const std::string& msg) : Error(msg) {}
};

struct SingularDesign : Error {
    explicit SingularDesign(const std::string& msg) : Error(msg) {}
};

struct RankTooLarge : Error {
    explicit RankTooLarge(const std::string& msg) : Error(msg) {}
};

struct NonPositiveLoss : Error {
    explicit NonPositiveLoss(const std::string& msg) : Error(msg) {}
};

struct InvalidHyperparams : Error {
    explicit InvalidHyperparams(const std::string& msg) : Error(msg) {}
};

struct TooShort : Error {
    explicit TooShort(const std::string& msg) : Error(msg) {}
};

struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& msg) : Error(msg) {}
};

/// Error thrown by a pipeline stage, tagged with the stage name.
struct StageError : Error {
    std::string stage;
    StageError(const std::string& stage_name, const std::string& msg)
        : Error(stage_name + ": " + msg), stage(stage_name) {}
};

}  // namespace idma
