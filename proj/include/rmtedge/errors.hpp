#pragma once

#include <stdexcept>
#include <string>

namespace rmtedge {

// Thrown for invalid user-facing parameters (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a numeric routine cannot meet its accuracy contract (CLI exit code 3).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation point collides with a spectral pole.
struct PoleError : NumericError {
    explicit PoleError(const std::string& msg) : NumericError(msg) {}
};

// Complex square root / power left its admissible branch.
struct BranchError : NumericError {
    explicit BranchError(const std::string& msg) : NumericError(msg) {}
};

// Fixed-point / root solve did not converge.
struct SolverError : NumericError {
    explicit SolverError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace rmtedge
