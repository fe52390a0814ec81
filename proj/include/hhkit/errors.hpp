#pragma once

#include <stdexcept>
#include <string>

namespace hhkit {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parameter tuple outside the range a theorem or definition accepts.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive integration stopped before reaching the requested tolerance.
class ToleranceError : public std::runtime_error {
public:
    ToleranceError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A theorem was asked to assert something on a function that failed
/// (or never went through) convexity certification.
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hhkit
