#pragma once

#include <stdexcept>
#include <string>

namespace celldyn {

struct ZeroDensityError : std::runtime_error {
    explicit ZeroDensityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when an explicit stability bound would be violated. The diffusion
/// steppers in this library are implicit (unconditionally stable), so this is
/// kept as a diagnostic type for explicit sub-steppers.
struct UnstableStepError : std::runtime_error {
    explicit UnstableStepError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CflViolationError : std::runtime_error {
    explicit CflViolationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IllPosedConfigError : std::runtime_error {
    explicit IllPosedConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfDomainError : std::runtime_error {
    explicit OutOfDomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal numerical failure (non-convergence, NaN detected, ...).
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace celldyn
