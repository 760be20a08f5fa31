#pragma once

#include <stdexcept>
#include <string>

namespace qdepol {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state violates its physical constraints (|a| > 1, non-unit trace, ...).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions do not match the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An input breaks a documented precondition (e.g. non-Hermitian matrix).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Matrix has an eigenvalue too negative to be round-off.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

/// Contraction vector is not realizable by a completely positive map.
class NotCompletelyPositiveError : public Error {
 public:
  using Error::Error;
};

/// No closed-form evaluation exists for the requested model.
class NoClosedFormError : public Error {
 public:
  using Error::Error;
};

/// Numerical integration did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_error(achieved) {}
  double achieved_error;
};

/// Integrator step size or trajectory left the stable regime.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression does not cover the supplied parameters.
class UnsupportedFormulaError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdepol
