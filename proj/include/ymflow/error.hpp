#pragma once

#include <stdexcept>
#include <string>

namespace ymflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two fields, transforms or series defined on different lattices.
class LatticeMismatch : public Error {
 public:
  LatticeMismatch() : Error("lattice mismatch") {}
};

/// Adaptive step size fell below the underflow floor.
class StepCollapse : public Error {
 public:
  StepCollapse(double t, double dt)
      : Error("step collapse at t=" + std::to_string(t) + " (dt=" + std::to_string(dt) + ")"),
        time(t),
        last_dt(dt) {}
  double time;
  double last_dt;
};

class NonFinite : public Error {
 public:
  explicit NonFinite(double t) : Error("non-finite field at t=" + std::to_string(t)), time(t) {}
  double time;
};

/// A monitor window [t0 - c R^2, t0] is not covered by the snapshot series.
class WindowNotCovered : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ymflow
