#pragma once

#include <stdexcept>
#include <string>

namespace lyapfun {

/// A matrix expected to be symmetric positive definite was not.
class NotSpdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix expected to be positive semidefinite was indefinite beyond
/// the clamping tolerance.
class NotPsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sample path produced a non-finite state. Carries the step at which
/// the blow-up was detected; dropping such paths would bias estimators,
/// so this is always an error.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// A quadrature did not reach the requested accuracy. Carries the
/// achieved error estimate.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace lyapfun
