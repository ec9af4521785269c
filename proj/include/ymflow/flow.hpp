#pragma once
// Exact gradient of S_alpha and Lie-group time integration.
//
// The flow is dU_mu(x)/dt = -Z_mu(x) U_mu(x), where Z is defined by
//   d/ds S_alpha(exp(sX) U)|_{s=0} = a^4 <X, Z_mu(x)>
// for every test direction X on link (x, mu). Consequently
//   dS_alpha/dt = -a^4 sum |Z|^2  (the dissipation),
// exactly, and step_euler / step_rk3 are consistent integrators of it.
// Flow time is the parameter of this lattice ODE; with spacing 1 it is the
// continuum flow time, and parameter files quote it in units of a^2.

#include <cstdint>
#include <functional>
#include <vector>

#include "ymflow/action.hpp"
#include "ymflow/error.hpp"
#include "ymflow/lattice.hpp"

namespace ymflow {

/// Gradient field, stored component-major z[(mu * 3 + k) * V + site].
struct ForceField {
  explicit ForceField(const Lattice& l) : lattice(l), z(l.volume() * kDim * 3, 0.0) {}
  AlgebraElem at(std::size_t site, int mu) const {
    const std::size_t v = lattice.volume();
    const std::size_t base = static_cast<std::size_t>(mu) * 3 * v + site;
    return {z[base], z[base + v], z[base + 2 * v]};
  }
  /// max over links of |Z|.
  double max_norm() const;
  /// a^4 sum |Z|^2.
  double dissipation() const;

  Lattice lattice;
  std::vector<double> z;
};

/// Per-site weights alpha (1 + rho)^(alpha - 1).
std::vector<double> force_weights(const DensityField& rho, double alpha);

/// Gradient of S_alpha via the active vector kernels.
ForceField force(const GaugeField& U, double alpha);

/// Single-link gradient from the plaquette definitions (reference path).
AlgebraElem link_force(const GaugeField& U, double alpha, std::size_t site, int mu);

/// Plain Wilson staple force (the alpha = 1 gradient), coded independently of force().
ForceField wilson_force(const GaugeField& U);

/// U'_mu(x) = exp(-dt Z_mu(x)) U_mu(x).
GaugeField step_euler(const GaugeField& U, double alpha, double dt);

/// Third-order commutator-free Lie-group Runge-Kutta step (1/4, 8/9, -17/36, 3/4).
GaugeField step_rk3(const GaugeField& U, double alpha, double dt);

enum class Integrator { euler, rk3 };

struct FlowParams {
  double alpha = 1.0;
  double dt = 0.01;
  double t_end = 1.0;
  Integrator integrator = Integrator::rk3;
  /// Halve dt when a step would raise S_alpha by more than tolerance * S_alpha(0).
  bool adaptive = false;
  double tolerance = 1e-12;
  int record_every = 1;
};

/// Throws ymflow::Error for invalid parameters.
void validate(const FlowParams& p);

struct TraceRecord {
  double t = 0.0;
  double action = 0.0;
  double ym = 0.0;
  double sup_f2 = 0.0;
  double charge = 0.0;
  double dissipation = 0.0;
  double dt_used = 0.0;
};

/// Called for every recorded sample with the field at that time.
using FlowObserver = std::function<void(const TraceRecord&, const GaugeField&)>;

struct FlowResult {
  GaugeField field;
  std::vector<TraceRecord> trace;
};

/// Thrown by run_flow with the last accepted state attached.
class FlowStepCollapse : public StepCollapse {
 public:
  FlowStepCollapse(double t, double dt, FlowResult last)
      : StepCollapse(t, dt), state(std::move(last)) {}
  FlowResult state;
};

class FlowNonFinite : public NonFinite {
 public:
  FlowNonFinite(double t, FlowResult last) : NonFinite(t), state(std::move(last)) {}
  FlowResult state;
};

/// Integrates to t_end. Records at t = 0, every record_every accepted steps,
/// and at t_end. Without adaptive stepping an action increase beyond the
/// tolerance is reported as FlowStepCollapse (the step cannot be reduced).
FlowResult run_flow(const GaugeField& U0, const FlowParams& p, const FlowObserver& observer = {});

struct CriticalOptions {
  double dt = 0.05;
  double dt_max = 0.2;
  std::int64_t max_iterations = 200000;
  /// Also stop once S_alpha - vacuum < stop_excess (0 disables).
  double stop_excess = 0.0;
};

struct CriticalResult {
  GaugeField field;
  bool converged = false;
  double residual = 0.0;  // max |Z|
  std::int64_t iterations = 0;
  double action = 0.0;
  bool below_excess = false;  // stopped by stop_excess
};

/// Gradient descent along the flow until max |Z| < tol or the stop_excess
/// condition holds. On reaching the
/// iteration cap the best iterate is returned with converged = false.
CriticalResult find_critical(const GaugeField& U0, double alpha, double tol,
                             const CriticalOptions& opt = {});

/// Flows both fields with fixed steps and returns the largest density distance
/// a^4 sum_x |rho_U(x) - rho_V(x)| over the recorded times.
double stability_compare(const GaugeField& U0, const GaugeField& V0, const FlowParams& p);

/// a^4 sum over |x - center| < R of (1 + rho)^alpha.
double local_energy(const DensityField& rho, double alpha, std::size_t center, double R);

}  // namespace ymflow
