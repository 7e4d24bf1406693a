#pragma once

#include <stdexcept>
#include <string>

namespace cslab {

// Every library error derives from Error; the CLI maps each class to one
// process exit code (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller handed us data that fails a precondition (sizes, ranges, units).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Object-level invariant broken, e.g. expectation of a non-Hermitian operator.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

// Query that is well-formed but has no function-valued answer.
class UnsupportedQuery : public Error {
 public:
  using Error::Error;
};

// Numerical result could not be trusted: imaginary residue, quadrature
// non-convergence, step-size blowup, time grid too coarse.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidBoost : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NoInversionPossible : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cslab
