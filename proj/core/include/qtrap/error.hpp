#pragma once

#include <stdexcept>
#include <string>

namespace qtrap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Imaginary deformation with sin(tau) = 0, or a non-positive q-number where a
/// square root is required.
class DegenerateDeformation : public Error {
 public:
  using Error::Error;
};

/// A q-factorial left the representable double range.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, int level) : Error(what), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

/// A series or a truncated basis is too short for the requested accuracy.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int minimum_size = -1)
      : Error(what), minimum_size_(minimum_size) {}
  /// Smallest acceptable truncation (or term count), -1 when unknown.
  int minimum_size() const noexcept { return minimum_size_; }

 private:
  int minimum_size_;
};

/// Eigensolver failure, step-size underflow and similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario or simulation parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtrap
