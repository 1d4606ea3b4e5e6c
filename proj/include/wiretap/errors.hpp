#pragma once

#include <stdexcept>
#include <string>

namespace wiretap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (pole of Gamma, x <= 0, rho >= 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameter combination the numerical method cannot handle.
class UnsupportedParameters : public Error {
public:
    using Error::Error;
};

/// A truncated series or quadrature did not reach its tolerance. Carries the
/// best value obtained and the achieved error estimate.
class PrecisionError : public Error {
public:
    PrecisionError(const std::string& what, double partial_value, double error_estimate)
        : Error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}

    double partial_value() const noexcept { return partial_value_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_value_;
    double error_estimate_;
};

/// Two routes that must agree did not, or a probability left [0, 1] by more
/// than roundoff.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace wiretap
