#pragma once

#include <stdexcept>
#include <string>

namespace chtx {

/// Rejected parameter, configuration, or functional-spec constraint.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// min(v) fell to or below the hard floor; the singular weight v^{-k} is no
/// longer trustworthy and the run must stop.
class FloorBreach : public std::runtime_error {
public:
    FloorBreach(double min_v, double hard_floor, double t)
        : std::runtime_error("v-floor breached: min(v)=" + std::to_string(min_v) +
                             " <= hard_floor=" + std::to_string(hard_floor) +
                             " at t=" + std::to_string(t)),
          min_v(min_v), hard_floor(hard_floor), time(t) {}
    double min_v;
    double hard_floor;
    double time;
};

/// Iterative solver failed to reach its tolerance.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(int iterations, double residual)
        : std::runtime_error("helmholtz solve did not converge after " +
                             std::to_string(iterations) +
                             " iterations (residual " + std::to_string(residual) + ")"),
          iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

/// Stability formula demanded a step below the configured minimum.
class DtUnderflow : public std::runtime_error {
public:
    DtUnderflow(double dt, double dt_min)
        : std::runtime_error("stable dt " + std::to_string(dt) + " fell below dt_min " +
                             std::to_string(dt_min)),
          dt(dt), dt_min(dt_min) {}
    double dt;
    double dt_min;
};

/// A monitored quantity evaluated to NaN/Inf.
class DiagnosticOverflow : public std::runtime_error {
public:
    explicit DiagnosticOverflow(const std::string& quantity)
        : std::runtime_error("diagnostic overflow: " + quantity + " is not finite"),
          quantity(quantity) {}
    std::string quantity;
};

/// File-level failure (missing, truncated, malformed, unwritable).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace chtx
