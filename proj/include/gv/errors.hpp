#pragma once

#include <stdexcept>
#include <string>

namespace gv {

// Base for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed arguments: wrong sizes, out-of-range parameters, mixed jet contexts.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

// Analytic domain violation (division by near-zero, fractional power of a
// non-positive value). Carries the offending value.
class DomainError : public Error {
public:
    DomainError(const std::string& msg, double offending)
        : Error(msg + " (value " + std::to_string(offending) + ")"),
          value(offending) {}
    double value;
};

// Singular or badly conditioned linear solve. Carries a condition estimate.
class LinearSolveError : public Error {
public:
    LinearSolveError(const std::string& msg, double cond_estimate)
        : Error(msg + " (cond ~ " + std::to_string(cond_estimate) + ")"),
          cond(cond_estimate) {}
    double cond;
};

// Constraint projection did not converge. Carries the last residual.
class ProjectionFailure : public Error {
public:
    ProjectionFailure(const std::string& msg, double last_residual)
        : Error(msg + " (residual " + std::to_string(last_residual) + ")"),
          residual(last_residual) {}
    double residual;
};

// Point too close to a focal set for hypersurface machinery.
class NearFocalError : public Error {
public:
    explicit NearFocalError(const std::string& msg) : Error(msg) {}
};

// Local least-squares fit too ill-conditioned to trust.
class UnreliableFitError : public Error {
public:
    UnreliableFitError(const std::string& msg, double cond_estimate)
        : Error(msg + " (cond ~ " + std::to_string(cond_estimate) + ")"),
          cond(cond_estimate) {}
    double cond;
};

// A 3-form outside the open nondegenerate orbit.
class DegenerateFormError : public Error {
public:
    explicit DegenerateFormError(const std::string& msg) : Error(msg) {}
};

// 1-D focal root search failed.
class FocalSearchError : public Error {
public:
    explicit FocalSearchError(const std::string& msg) : Error(msg) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

}  // namespace gv
