#pragma once

#include <stdexcept>
#include <string>

namespace gpricing {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: unknown keys, inconsistent hyperparameters, unknown op tags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or other numerical breakdowns during computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Argument outside an operation's domain (empty input, non-finite value, shape mismatch).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpricing
