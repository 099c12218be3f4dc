#pragma once

#include <stdexcept>
#include <string>

namespace scatterkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, inconsistent shapes or bad configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Iterative solvers that fail to converge, non-finite iterates, divergence.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}

  /// Last relative residual reached before giving up (0 when meaningless).
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Unreadable, truncated or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scatterkit
