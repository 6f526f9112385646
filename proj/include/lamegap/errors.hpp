#pragma once

#include <stdexcept>
#include <string>

namespace lamegap {

/// Bad or inconsistent user input (config keys, parameter ranges).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Geometry violates a structural requirement (gap closes, non-convex at the
/// touching point, point outside the validated neighborhood).
struct GeometryError : std::domain_error {
    explicit GeometryError(const std::string& msg) : std::domain_error(msg) {}
};

/// The requested (family, d, m, k) tuple falls outside every stated case of
/// the rate tables. Never extrapolated silently.
struct CaseNotCovered : std::runtime_error {
    explicit CaseNotCovered(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: singular system, unreachable tolerance, step too large.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lamegap
