#include "ymflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ymflow/kernels.hpp"
#include "ymflow/parallel.hpp"

namespace ymflow {

double ForceField::max_norm() const {
  const std::size_t v = lattice.volume();
  double m2 = 0.0;
  for (int mu = 0; mu < kDim; ++mu) {
    const double* z1 = z.data() + (mu * 3 + 0) * v;
    const double* z2 = z.data() + (mu * 3 + 1) * v;
    const double* z3 = z.data() + (mu * 3 + 2) * v;
    m2 = std::max(m2, parallel_max(v, [&](std::size_t s) {
                    return z1[s] * z1[s] + z2[s] * z2[s] + z3[s] * z3[s];
                  }));
  }
  return std::sqrt(m2);
}

double ForceField::dissipation() const {
  const double a = lattice.spacing();
  const double* p = z.data();
  return a * a * a * a * parallel_sum(z.size(), [&](std::size_t i) { return p[i] * p[i]; });
}

std::vector<double> force_weights(const DensityField& rho, double alpha) {
  std::vector<double> w(rho.rho.size(), alpha);
  if (alpha == 1.0) return w;
  parallel_for(w.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) w[s] = alpha * std::pow(1.0 + rho.rho[s], alpha - 1.0);
  });
  return w;
}

ForceField force(const GaugeField& U, double alpha) {
  if (!(alpha >= 1.0)) throw Error("alpha must be >= 1");
  const auto& k = kernels::active_kernels();
  DensityField rho(U.lattice());
  k.action_density(U, rho.rho.data());
  const std::vector<double> w = force_weights(rho, alpha);
  ForceField Z(U.lattice());
  k.force(U, w.data(), Z.z.data());
  return Z;
}

namespace {

double reference_density(const GaugeField& U, std::size_t x) {
  double r = 0.0;
  for (const auto& [mu, nu] : kPlaneDirs) r += plaquette_density(U, x, mu, nu);
  return r;
}

// U_nu(x+mu) U_mu(x+nu)^-1 U_nu(x)^-1
GroupElem staple_up(const GaugeField& U, std::size_t x, int mu, int nu) {
  const Lattice& lat = U.lattice();
  return mul_raw(mul_raw(U.link(lat.up(x, mu), nu), inverse(U.link(lat.up(x, nu), mu))),
                 inverse(U.link(x, nu)));
}

// U_nu(x+mu-nu)^-1 U_mu(x-nu)^-1 U_nu(x-nu)
GroupElem staple_down(const GaugeField& U, std::size_t x, int mu, int nu) {
  const Lattice& lat = U.lattice();
  const std::size_t xm = lat.down(x, nu);
  return mul_raw(mul_raw(inverse(U.link(lat.up(xm, mu), nu)), inverse(U.link(xm, mu))),
                 U.link(xm, nu));
}

GroupElem axpy(double w, const GroupElem& g, const GroupElem& acc) {
  return {acc.q0 + w * g.q0, acc.q1 + w * g.q1, acc.q2 + w * g.q2, acc.q3 + w * g.q3};
}

}  // namespace

AlgebraElem link_force(const GaugeField& U, double alpha, std::size_t x, int mu) {
  if (!(alpha >= 1.0)) throw Error("alpha must be >= 1");
  const Lattice& lat = U.lattice();
  const double a = lat.spacing();
  auto weight = [&](std::size_t y) {
    return alpha * std::pow(1.0 + reference_density(U, y), alpha - 1.0);
  };
  GroupElem acc{0.0, 0.0, 0.0, 0.0};
  for (int nu = 0; nu < kDim; ++nu) {
    if (nu == mu) continue;
    acc = axpy(weight(x), staple_up(U, x, mu, nu), acc);
    acc = axpy(weight(lat.down(x, nu)), staple_down(U, x, mu, nu), acc);
  }
  const GroupElem g = mul_raw(U.link(x, mu), acc);
  const double c = kKappa / (a * a * a * a);
  return {c * g.q1, c * g.q2, c * g.q3};
}

ForceField wilson_force(const GaugeField& U) {
  const Lattice& lat = U.lattice();
  const std::size_t v = lat.volume();
  const double a = lat.spacing();
  // d/ds (kappa/a^4)(2 - 2 Re exp(sX) P) = -(kappa/a^4) <X, project(P)> / 2 per plaquette,
  // and S_1 = a^4 sum (1 + rho), so Z = (kappa/2) sum_P project(P) / a^4 * a^4 / a^4.
  const double c = 0.5 * kKappa / (a * a * a * a);
  ForceField Z(lat);
  for (std::size_t x = 0; x < v; ++x) {
    for (int mu = 0; mu < kDim; ++mu) {
      AlgebraElem sum;
      for (int nu = 0; nu < kDim; ++nu) {
        if (nu == mu) continue;
        sum += project_algebra(mul_raw(U.link(x, mu), staple_up(U, x, mu, nu)));
        sum += project_algebra(mul_raw(U.link(x, mu), staple_down(U, x, mu, nu)));
      }
      const std::size_t base = static_cast<std::size_t>(mu) * 3 * v + x;
      Z.z[base] = c * sum.c1;
      Z.z[base + v] = c * sum.c2;
      Z.z[base + 2 * v] = c * sum.c3;
    }
  }
  return Z;
}

namespace {

void axpby(std::vector<double>& out, double a, const std::vector<double>& x, double b,
           const std::vector<double>& y) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
}

// One step from U, given the force Z0 already evaluated at U.
GaugeField advance(const GaugeField& U, const ForceField& Z0, double alpha, double dt,
                   Integrator integrator) {
  const auto& k = kernels::active_kernels();
  GaugeField W = U;
  if (integrator == Integrator::euler) {
    k.exp_update(W, Z0.z.data(), -dt);
    return W;
  }
  k.exp_update(W, Z0.z.data(), -0.25 * dt);
  const ForceField Z1 = force(W, alpha);
  std::vector<double> combo(Z0.z.size());
  axpby(combo, 8.0 / 9.0, Z1.z, -17.0 / 36.0, Z0.z);
  k.exp_update(W, combo.data(), -dt);
  const ForceField Z2 = force(W, alpha);
  for (std::size_t i = 0; i < combo.size(); ++i)
    combo[i] = 0.75 * Z2.z[i] - 8.0 / 9.0 * Z1.z[i] + 17.0 / 36.0 * Z0.z[i];
  k.exp_update(W, combo.data(), -dt);
  return W;
}

}  // namespace

GaugeField step_euler(const GaugeField& U, double alpha, double dt) {
  if (!(dt > 0.0)) throw Error("dt must be > 0");
  return advance(U, force(U, alpha), alpha, dt, Integrator::euler);
}

GaugeField step_rk3(const GaugeField& U, double alpha, double dt) {
  if (!(dt > 0.0)) throw Error("dt must be > 0");
  return advance(U, force(U, alpha), alpha, dt, Integrator::rk3);
}

void validate(const FlowParams& p) {
  if (!(p.alpha >= 1.0)) throw Error("alpha must be >= 1");
  if (!(p.dt > 0.0)) throw Error("dt must be > 0");
  if (!(p.t_end > 0.0)) throw Error("t_end must be > 0");
  if (p.dt > p.t_end) throw Error("dt must not exceed t_end");
  if (!(p.tolerance >= 0.0)) throw Error("tolerance must be >= 0");
  if (p.record_every < 1) throw Error("record_every must be >= 1");
}

FlowResult run_flow(const GaugeField& U0, const FlowParams& p, const FlowObserver& observer) {
  validate(p);
  const double a2 = U0.lattice().spacing() * U0.lattice().spacing();
  const double dt_floor = 1e-10 * a2;

  FlowResult res{U0, {}};
  GaugeField& U = res.field;
  ForceField Z = force(U, p.alpha);
  Observables obs = measure(U, p.alpha);
  const double S0 = obs.action;
  double S = S0;
  double t = 0.0;
  double dt = p.dt;
  double last_dt = 0.0;
  std::int64_t steps = 0;

  auto record = [&] {
    TraceRecord r{t, obs.action, obs.ym, obs.sup_f2, obs.charge, Z.dissipation(), last_dt};
    res.trace.push_back(r);
    if (observer) observer(r, U);
  };
  record();

  const double t_eps = 1e-12 * p.t_end;
  while (t < p.t_end - t_eps) {
    const double h = std::min(dt, p.t_end - t);
    GaugeField next = advance(U, Z, p.alpha, h, p.integrator);
    if (!next.all_finite()) throw FlowNonFinite(t, std::move(res));
    const double S_next = alpha_action(next, p.alpha);
    if (!std::isfinite(S_next)) throw FlowNonFinite(t, std::move(res));
    if (S_next > S + p.tolerance * S0) {
      if (!p.adaptive) throw FlowStepCollapse(t, h, std::move(res));
      dt = 0.5 * h;
      if (dt < dt_floor) throw FlowStepCollapse(t, dt, std::move(res));
      continue;
    }
    U = std::move(next);
    S = S_next;
    t += h;
    last_dt = h;
    ++steps;
    Z = force(U, p.alpha);
    if (p.adaptive && dt < p.dt) dt = std::min(p.dt, 1.25 * dt);
    const bool at_end = !(t < p.t_end - t_eps);
    if (steps % p.record_every == 0 || at_end) {
      obs = measure(U, p.alpha);
      record();
    }
  }
  return res;
}

CriticalResult find_critical(const GaugeField& U0, double alpha, double tol,
                             const CriticalOptions& opt) {
  if (!(tol > 0.0)) throw Error("tol must be > 0");
  const auto& k = kernels::active_kernels();
  CriticalResult res{U0, false, 0.0, 0, 0.0};
  GaugeField& U = res.field;
  double S = alpha_action(U, alpha);
  ForceField Z = force(U, alpha);
  double dt = std::min(opt.dt, opt.dt_max);
  double ceiling = opt.dt_max;
  res.residual = Z.max_norm();
  const double vac = vacuum_action(U.lattice());
  while (res.iterations < opt.max_iterations) {
    if (res.residual < tol) {
      res.converged = true;
      break;
    }
    if (S - vac < opt.stop_excess) {
      res.below_excess = true;
      break;
    }
    GaugeField next = U;
    k.exp_update(next, Z.z.data(), -dt);
    const double S_next = alpha_action(next, alpha);
    ++res.iterations;
    // Near convergence the decrease falls below the rounding of S itself.
    if (std::isfinite(S_next) && S_next <= S * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) {
      U = std::move(next);
      S = S_next;
      Z = force(U, alpha);
      res.residual = Z.max_norm();
      dt = std::min(ceiling, 1.1 * dt);
    } else {
      // never grow back to a step that has failed once
      ceiling = 0.8 * dt;
      dt *= 0.5;
      if (dt < 1e-12) break;
    }
  }
  res.action = S;
  return res;
}

double stability_compare(const GaugeField& U0, const GaugeField& V0, const FlowParams& p) {
  validate(p);
  require_same(U0.lattice(), V0.lattice());
  const double a = U0.lattice().spacing();
  GaugeField U = U0, V = V0;
  auto distance = [&] {
    const DensityField ru = action_density(U), rv = action_density(V);
    return a * a * a * a * parallel_sum(ru.rho.size(), [&](std::size_t s) {
             return std::abs(ru.rho[s] - rv.rho[s]);
           });
  };
  double worst = distance();
  double t = 0.0;
  std::int64_t steps = 0;
  const double t_eps = 1e-12 * p.t_end;
  while (t < p.t_end - t_eps) {
    const double h = std::min(p.dt, p.t_end - t);
    U = advance(U, force(U, p.alpha), p.alpha, h, p.integrator);
    V = advance(V, force(V, p.alpha), p.alpha, h, p.integrator);
    t += h;
    ++steps;
    if (steps % p.record_every == 0 || !(t < p.t_end - t_eps)) worst = std::max(worst, distance());
  }
  return worst;
}

double local_energy(const DensityField& rho, double alpha, std::size_t center, double R) {
  const Lattice& lat = rho.lattice;
  const double a = lat.spacing();
  const double R2 = R * R;
  return a * a * a * a * parallel_sum(lat.volume(), [&](std::size_t s) {
           return lat.distance2(center, s) < R2 ? std::pow(1.0 + rho.rho[s], alpha) : 0.0;
         });
}

}  // namespace ymflow
