#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracshoot {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad order, interval, mesh, configuration or identifier.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical failure of some kind. Callers that only need to distinguish
/// "bad input" from "the numerics gave up" catch this one.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A Mittag-Leffler evaluation could not reach the requested tolerance.
class AccuracyError : public NumericalError {
public:
    AccuracyError(const std::string& what, double best_estimate, double error_bound)
        : NumericalError(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

/// Newton iteration inside an implicit step did not converge.
class SolverError : public NumericalError {
public:
    SolverError(const std::string& what, std::size_t step)
        : NumericalError(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// The user-supplied right-hand side returned a non-finite value.
class RhsError : public NumericalError {
public:
    RhsError(const std::string& what, double t, double y)
        : NumericalError(what), t_(t), y_(y) {}

    double t() const noexcept { return t_; }
    double y() const noexcept { return y_; }

private:
    double t_;
    double y_;
};

/// Every probe of a Lipschitz-quotient scan was rejected.
class EstimationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Invalid proportionality factor handed to the second-guess rule.
class StrategyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Secant update with two identical terminal values.
class DegenerateSecantError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Trajectory and reference live on incompatible meshes.
class MetricError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace fracshoot
