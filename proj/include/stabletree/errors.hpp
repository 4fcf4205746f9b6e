#pragma once

#include <stdexcept>
#include <string>

namespace stabletree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain (alpha range, non-positive edge length, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on an object that does not satisfy its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Stick-breaking did not reach the residual tolerance within the stick budget.
class TruncationFailure : public Error {
 public:
  using Error::Error;
};

/// Conditioned tree sampling exhausted its retry budget.
class SamplingFailure : public Error {
 public:
  using Error::Error;
};

/// A quadrature or a renewal integral does not converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A closed form disagreed with its independent numerical route.
class DerivationFailure : public Error {
 public:
  using Error::Error;
};

/// A theorem that must hold exactly on every tree was violated. Always a bug.
class StructuralFailure : public Error {
 public:
  using Error::Error;
};

/// Heat trace truncation bound exceeds the allowed fraction of the value.
class InsufficientSpectrum : public Error {
 public:
  using Error::Error;
};

/// Fit window does not satisfy the decade / count requirements.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// An LDL pivot fell below tolerance: lambda sits (numerically) on an eigenvalue.
/// Callers perturb lambda by suggested_lambda() and retry.
class GridCollision : public Error {
 public:
  explicit GridCollision(double lambda)
      : Error("pivot below tolerance at lambda=" + std::to_string(lambda) +
              "; retry at lambda + 1e-12*(1+|lambda|)"),
        lambda_(lambda) {}

  double lambda() const noexcept { return lambda_; }
  double suggested_lambda() const noexcept;

 private:
  double lambda_;
};

}  // namespace stabletree
