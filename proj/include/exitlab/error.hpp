#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace exitlab {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
    success = 0,
    config_error = 2,
    numerical_error = 3,
    insufficient_data = 4,
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, ExitCode code = ExitCode::numerical_error)
        : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& w) : Error("invalid parameter: " + w, ExitCode::config_error) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config error: " + w, ExitCode::config_error) {}
};

/// Thrown when a trajectory leaves the finite range; carries the step index.
struct NumericalBlowup : Error {
    NumericalBlowup(const std::string& w, std::int64_t step)
        : Error("numerical blowup at step " + std::to_string(step) + ": " + w), step_index(step) {}
    std::int64_t step_index;
};

struct EmptyMeasure : Error {
    EmptyMeasure() : Error("empty measure: elapsed time is zero") {}
};

struct SolverFailure : Error {
    explicit SolverFailure(const std::string& w) : Error("solver failure: " + w) {}
};

struct UnsupportedDimension : Error {
    explicit UnsupportedDimension(const std::string& w) : Error("unsupported dimension: " + w, ExitCode::config_error) {}
};

struct GridCoverage : Error {
    explicit GridCoverage(const std::string& w) : Error("grid coverage: " + w) {}
};

struct NonConvergence : Error {
    NonConvergence(const std::string& w, double residual)
        : Error("no convergence: " + w + " (last residual " + std::to_string(residual) + ")"),
          last_residual(residual) {}
    double last_residual;
};

struct InvalidDomain : Error {
    explicit InvalidDomain(const std::string& w) : Error("invalid domain: " + w, ExitCode::config_error) {}
};

struct EmptyDomain : Error {
    explicit EmptyDomain(const std::string& w) : Error("empty domain: " + w, ExitCode::config_error) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& w) : Error("insufficient data: " + w, ExitCode::insufficient_data) {}
};

struct FlowOrbitOutsideDomain : Error {
    explicit FlowOrbitOutsideDomain(const std::string& w) : Error("flow orbit outside domain: " + w, ExitCode::config_error) {}
};

struct PartitionCoverage : Error {
    explicit PartitionCoverage(const std::string& w) : Error("partition coverage: " + w) {}
};

}  // namespace exitlab
