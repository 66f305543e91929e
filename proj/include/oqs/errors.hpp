#pragma once

#include <stdexcept>
#include <string>

namespace oqs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented invariant (hermiticity, positivity, normalization, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed. `operation()` names the routine that gave up
/// so that the CLI can report it (exit code 2).
class NumericalError : public Error {
 public:
  NumericalError(std::string operation, const std::string& detail)
      : Error(operation + ": " + detail), operation_(std::move(operation)) {}

  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string operation_;
};

}  // namespace oqs
