#pragma once

#include <stdexcept>
#include <string>

namespace jod {

// Bad user input or configuration. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gram submatrix of the candidate predictors is (numerically) singular.
class SingularDesign : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Residual variance hit the floor before taking the log.
class DegenerateVariance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Brute-force enumeration requested above the configured size limit.
class LimitExceeded : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// File system / parse failure. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jod
