#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace westervelt {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition: bad sizes, ranges or configuration values.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A field left the parabolic regime: sup|u| exceeded the allowed margin, so
/// the coefficient 1/(1 - 2k u) is no longer uniformly positive and bounded.
class ParabolicityViolation : public Error {
public:
    ParabolicityViolation(std::size_t node, double value, double margin)
        : Error("parabolicity violated at node " + std::to_string(node) + ": |u| = " +
                std::to_string(value) + " exceeds margin " + std::to_string(margin)),
          node_(node),
          value_(value),
          margin_(margin) {}

    std::size_t node() const noexcept { return node_; }
    double value() const noexcept { return value_; }
    double margin() const noexcept { return margin_; }

private:
    std::size_t node_;
    double value_;
    double margin_;
};

/// lambda*b - c^2 is too close to zero; the scalar map lambda^2/(lambda*b - c^2)
/// is undefined on that line.
class SingularMu : public Error {
public:
    explicit SingularMu(std::complex<double> lambda)
        : Error("mu(lambda) undefined: lambda*b - c^2 vanishes at lambda = (" +
                std::to_string(lambda.real()) + ", " + std::to_string(lambda.imag()) + ")"),
          lambda_(lambda) {}

    std::complex<double> lambda() const noexcept { return lambda_; }

private:
    std::complex<double> lambda_;
};

/// The shifted solve behind the block resolvent failed or left a residual
/// above tolerance; lambda is not in the resolvent set of the discrete operator.
class SingularResolvent : public Error {
public:
    SingularResolvent(std::complex<double> lambda, double residual)
        : Error("resolvent solve failed at lambda = (" + std::to_string(lambda.real()) + ", " +
                std::to_string(lambda.imag()) + "), relative residual " + std::to_string(residual)),
          lambda_(lambda),
          residual_(residual) {}

    std::complex<double> lambda() const noexcept { return lambda_; }
    double residual() const noexcept { return residual_; }

private:
    std::complex<double> lambda_;
    double residual_;
};

/// Decay-rate fit impossible: norms underflowed to zero or the envelope has
/// fewer than three peaks.
class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// An iterative or direct solver did not reach its tolerance.
class SolverFailure : public Error {
public:
    using Error::Error;
};

/// Configuration rejected; the message names the offending field.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace westervelt
