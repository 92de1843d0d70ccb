#pragma once

#include <stdexcept>
#include <string>

namespace momentmap {

// Base for every error raised by the library. Callers that only care about
// "did the numerics succeed" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class AsymmetricInput : public Error {
 public:
  using Error::Error;
};

// S*S^T - v*v^T is not positive definite: ||S^-1 v|| >= 1 up to roundoff.
class DowndateBreaksDefiniteness : public Error {
 public:
  DowndateBreaksDefiniteness(const std::string& what, double whitened_norm_sq)
      : Error(what), whitened_norm_sq_(whitened_norm_sq) {}

  double whitened_norm_sq() const noexcept { return whitened_norm_sq_; }

 private:
  double whitened_norm_sq_;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double best_residual, bool symmetrization_failed)
      : Error(what), best_residual_(best_residual), symmetrization_failed_(symmetrization_failed) {}

  double best_residual() const noexcept { return best_residual_; }
  // True when at least one restart reached a small residual only with
  // factors that could not be made symmetric (negative weights).
  bool symmetrization_failed() const noexcept { return symmetrization_failed_; }

 private:
  double best_residual_;
  bool symmetrization_failed_;
};

class MalformedFile : public Error {
 public:
  using Error::Error;
};

class FailedInvariant : public Error {
 public:
  using Error::Error;
};

class OriginSingularity : public Error {
 public:
  using Error::Error;
};

class IntegrationDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace momentmap
