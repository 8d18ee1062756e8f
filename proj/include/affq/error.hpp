#pragma once

#include <stdexcept>
#include <string>

namespace affq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (x <= 0 for Bessel, t outside [0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Pole of a meromorphic function.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A quadrature or extrapolation did not reach its tolerance. Carries the best estimate.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_(best_estimate), err_(error_estimate) {}
  double best_estimate() const { return best_; }
  double error_estimate() const { return err_; }

 private:
  double best_;
  double err_;
};

/// The integrand returned NaN or infinity.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// An integral that defines a constant does not converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Fiducial vector with infinite Duflo-Moore norm.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Observable not in the supported catalog.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Hamiltonian or other matrix that fails a structural precondition.
class ValidityError : public Error {
 public:
  using Error::Error;
};

/// Parse failure with a 1-based column.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, int column)
      : Error(what + " at column " + std::to_string(column)), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

}  // namespace affq
