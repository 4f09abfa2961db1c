#pragma once

#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tentfarey {

namespace detail {

/// "1.234e-05": for error messages about tiny quantities.
inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace detail

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent or malformed experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Reading or writing an output file failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base of all failures of a numerical procedure on valid input.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The running error bound of a cancelling sum exceeds what the working
/// precision can deliver. Retry with more mantissa bits.
class PrecisionError : public NumericError {
public:
    PrecisionError(const std::string& what, double error_bound, unsigned bits)
        : NumericError(what), error_bound_(error_bound), bits_(bits) {}

    double error_bound() const noexcept { return error_bound_; }
    unsigned bits() const noexcept { return bits_; }

private:
    double error_bound_;
    unsigned bits_;
};

/// A root or eigenvalue iteration did not converge.
class ComputationError : public NumericError {
public:
    using NumericError::NumericError;
};

/// QR iteration exhausted its sweep budget. Eigenvalues deflated before the
/// failure are kept for diagnostics.
class ConvergenceError : public ComputationError {
public:
    ConvergenceError(const std::string& what, std::vector<std::complex<double>> partial)
        : ComputationError(what), partial_(std::move(partial)) {}

    const std::vector<std::complex<double>>& partial() const noexcept { return partial_; }

private:
    std::vector<std::complex<double>> partial_;
};

/// An eigenpair failed its residual certificate.
class CertificationError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace tentfarey
