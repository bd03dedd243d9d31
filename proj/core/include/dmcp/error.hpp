#pragma once

#include <stdexcept>
#include <string>

namespace dmcp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Root finder gave up; carries the last residual norm.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual_norm)
      : Error(what), residual_norm_(residual_norm) {}
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  double residual_norm_;
};

/// Inputs for which the requested quantity is undefined (e.g. a radius
/// when the error-free point already misses the threshold).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Requested value lies outside a calibration's reachable range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent external data (calibration files, tables).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace dmcp
