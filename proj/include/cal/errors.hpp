#pragma once

#include <stdexcept>
#include <string>

namespace cal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// μ = 0: the fourth-order form is undefined, use the gradient-flow regime.
class DegenerateMass : public Error {
 public:
  DegenerateMass() : Error("degenerate mass: mu == 0, use the gradient-flow regime") {}
};

class InvalidTheta : public Error {
 public:
  explicit InvalidTheta(double theta)
      : Error("invalid theta " + std::to_string(theta) + ": theta must be > 0") {}
};

class InvalidRho : public Error {
 public:
  explicit InvalidRho(double rho)
      : Error("invalid rho " + std::to_string(rho) + ": rho must be > 0") {}
};

class InvalidEpsilon : public Error {
 public:
  explicit InvalidEpsilon(double eps)
      : Error("invalid epsilon " + std::to_string(eps) + ": epsilon must be > 0") {}
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Characteristic roots too close for the exponential-sum representation.
class ConfluentRoots : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// A state entry left the finite range during integration.
class NonFinite : public Error {
 public:
  explicit NonFinite(double time)
      : Error("state became non-finite at t = " + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cal
