#pragma once

#include <stdexcept>
#include <string>

namespace masharp {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid domain description or a query outside the domain.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Point handed to a distance query lies outside the closed domain.
class OutsideDomainError : public GeometryError {
 public:
  OutsideDomainError(const std::string& what, double violation)
      : GeometryError(what), violation_(violation) {}
  /// Signed amount by which the point violates the domain (> 0).
  double violation() const { return violation_; }

 private:
  double violation_;
};

class UnboundedDomainError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Grid or band too coarse for the requested computation.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Problem specification violates one of its invariants.
class SpecError : public Error {
 public:
  using Error::Error;
};

class ExpressionError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Log-log regression inputs are invalid or ill-conditioned.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Experiment config does not follow the schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace masharp
