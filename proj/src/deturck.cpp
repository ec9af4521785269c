#include "ymflow/deturck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ymflow/error.hpp"
#include "ymflow/parallel.hpp"

namespace ymflow {

namespace {

// plane index of (mu, nu) with sign: F_{mu nu} = sign * F[plane]
int plane_of(int mu, int nu, double& sign) {
  const int lo = std::min(mu, nu), hi = std::max(mu, nu);
  sign = mu < nu ? 1.0 : -1.0;
  for (int p = 0; p < kPlanes; ++p)
    if (kPlaneDirs[p][0] == lo && kPlaneDirs[p][1] == hi) return p;
  return -1;
}

AlgebraElem F_at(const CurvatureField& F, std::size_t x, int mu, int nu) {
  if (mu == nu) return {};
  double sign = 1.0;
  const int p = plane_of(mu, nu, sign);
  return sign * F.at(x, p);
}

void add_scaled(std::vector<AlgebraElem>& out, double s, const std::vector<AlgebraElem>& v) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * v[i];
}

GroupElem quat_axpy(const GroupElem& y, double s, const GroupElem& x) {
  return {y.q0 + s * x.q0, y.q1 + s * x.q1, y.q2 + s * x.q2, y.q3 + s * x.q3};
}

void require_finite(const std::vector<AlgebraElem>& v, double t) {
  for (const auto& e : v)
    if (!std::isfinite(e.c1) || !std::isfinite(e.c2) || !std::isfinite(e.c3)) throw NonFinite(t);
}

}  // namespace

CurvatureField fd_curvature(const ConnectionField& a) {
  const Lattice& lat = a.lattice;
  const double h = 0.5 / lat.spacing();
  CurvatureField F(lat);
  parallel_for(lat.volume(), [&](std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      for (int p = 0; p < kPlanes; ++p) {
        const int mu = kPlaneDirs[p][0], nu = kPlaneDirs[p][1];
        const AlgebraElem dmu_anu = h * (a.at(lat.up(x, mu), nu) - a.at(lat.down(x, mu), nu));
        const AlgebraElem dnu_amu = h * (a.at(lat.up(x, nu), mu) - a.at(lat.down(x, nu), mu));
        F.F[x * kPlanes + p] = dmu_anu - dnu_amu + bracket(a.at(x, mu), a.at(x, nu));
      }
    }
  });
  return F;
}

DensityField fd_density(const CurvatureField& F) { return clover_density(F); }

ConnectionField direct_alpha_rhs(const ConnectionField& a, double alpha) {
  if (!(alpha >= 1.0)) throw Error("alpha must be >= 1");
  const Lattice& lat = a.lattice;
  const double h = 0.5 / lat.spacing();
  const CurvatureField F = fd_curvature(a);
  const DensityField f2 = fd_density(F);
  ConnectionField out(lat);
  parallel_for(lat.volume(), [&](std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      for (int nu = 0; nu < kDim; ++nu) {
        AlgebraElem v;
        for (int mu = 0; mu < kDim; ++mu) {
          if (mu == nu) continue;
          const AlgebraElem Fx = F_at(F, x, mu, nu);
          v += h * (F_at(F, lat.up(x, mu), mu, nu) - F_at(F, lat.down(x, mu), mu, nu));
          v += bracket(a.at(x, mu), Fx);
          if (alpha != 1.0) {
            const double g = h * (f2.rho[lat.up(x, mu)] - f2.rho[lat.down(x, mu)]);
            v += ((alpha - 1.0) * g / (1.0 + f2.rho[x])) * Fx;
          }
        }
        out.at(x, nu) = v;
      }
    }
  });
  return out;
}

std::vector<AlgebraElem> gauge_generator(const ConnectionField& a) {
  const Lattice& lat = a.lattice;
  const double h = 0.5 / lat.spacing();
  std::vector<AlgebraElem> phi(lat.volume());
  parallel_for(lat.volume(), [&](std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      AlgebraElem d;
      for (int mu = 0; mu < kDim; ++mu) d += a.at(lat.up(x, mu), mu) - a.at(lat.down(x, mu), mu);
      phi[x] = -h * d;
    }
  });
  return phi;
}

namespace {

ConnectionField modified_from(const ConnectionField& a, double alpha,
                              const std::vector<AlgebraElem>& phi) {
  const Lattice& lat = a.lattice;
  const double h = 0.5 / lat.spacing();
  ConnectionField out = direct_alpha_rhs(a, alpha);
  parallel_for(lat.volume(), [&](std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x)
      for (int nu = 0; nu < kDim; ++nu)
        out.at(x, nu) -= h * (phi[lat.up(x, nu)] - phi[lat.down(x, nu)]) +
                         bracket(a.at(x, nu), phi[x]);
  });
  return out;
}

// -S (phi/2) as a quaternion per site
std::vector<GroupElem> gauge_velocity(const GaugeTransform& S, const std::vector<AlgebraElem>& phi) {
  std::vector<GroupElem> v(phi.size());
  for (std::size_t x = 0; x < phi.size(); ++x) {
    const GroupElem p{0.0, -0.5 * phi[x].c1, -0.5 * phi[x].c2, -0.5 * phi[x].c3};
    v[x] = mul_raw(S.g[x], p);
  }
  return v;
}

}  // namespace

ConnectionField modified_rhs(const ConnectionField& a, double alpha) {
  return modified_from(a, alpha, gauge_generator(a));
}

ConnectionField gauge_act(const ConnectionField& a, const GaugeTransform& S) {
  require_same(a.lattice, S.lattice);
  const Lattice& lat = a.lattice;
  const double h = 0.5 / lat.spacing();
  ConnectionField out(lat);
  parallel_for(lat.volume(), [&](std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      const GroupElem sinv = inverse(S.g[x]);
      for (int mu = 0; mu < kDim; ++mu) {
        const GroupElem& sp = S.g[lat.up(x, mu)];
        const GroupElem& sm = S.g[lat.down(x, mu)];
        const GroupElem ds{h * (sp.q0 - sm.q0), h * (sp.q1 - sm.q1), h * (sp.q2 - sm.q2),
                           h * (sp.q3 - sm.q3)};
        out.at(x, mu) = adjoint(S.g[x], a.at(x, mu)) - project_algebra(mul_raw(ds, sinv));
      }
    }
  });
  return out;
}

PairResult evolve_pair(const ConnectionField& a0, double alpha, double dt, double t_end) {
  if (!(alpha >= 1.0)) throw Error("alpha must be >= 1");
  const Lattice& lat = a0.lattice;
  const double a = lat.spacing();
  if (!(dt > 0.0) || dt > a * a / 16.0) throw Error("evolve_pair needs 0 < dt <= a^2/16");
  if (!(t_end >= 0.0)) throw Error("t_end must be >= 0");

  PairResult r{{a0, 0.0}, {a0, 0.0}, {GaugeTransform(lat), 0.0}};
  std::vector<AlgebraElem>& ad = r.direct.a.a;
  std::vector<AlgebraElem>& am = r.modified.a.a;
  std::vector<GroupElem>& S = r.gauge.S.g;
  const std::size_t n = ad.size();
  const std::size_t v = S.size();

  struct Rates {
    std::vector<AlgebraElem> d, m;
    std::vector<GroupElem> s;
  };
  auto rates = [&]() {
    const std::vector<AlgebraElem> phi = gauge_generator(r.modified.a);
    return Rates{direct_alpha_rhs(r.direct.a, alpha).a, modified_from(r.modified.a, alpha, phi).a,
                 gauge_velocity(r.gauge.S, phi)};
  };

  double t = 0.0;
  const double t_eps = 1e-12 * std::max(t_end, 1.0);
  while (t < t_end - t_eps) {
    const double h = std::min(dt, t_end - t);
    const Rates k0 = rates();
    add_scaled(ad, 0.25 * h, k0.d);
    add_scaled(am, 0.25 * h, k0.m);
    for (std::size_t x = 0; x < v; ++x) S[x] = quat_axpy(S[x], 0.25 * h, k0.s[x]);

    const Rates k1 = rates();
    const double c10 = 8.0 / 9.0 * h, c00 = -17.0 / 36.0 * h;
    for (std::size_t i = 0; i < n; ++i) {
      ad[i] += c10 * k1.d[i] + c00 * k0.d[i];
      am[i] += c10 * k1.m[i] + c00 * k0.m[i];
    }
    for (std::size_t x = 0; x < v; ++x)
      S[x] = quat_axpy(quat_axpy(S[x], c10, k1.s[x]), c00, k0.s[x]);

    const Rates k2 = rates();
    const double c2 = 0.75 * h, c1 = -8.0 / 9.0 * h, c0 = 17.0 / 36.0 * h;
    for (std::size_t i = 0; i < n; ++i) {
      ad[i] += c2 * k2.d[i] + c1 * k1.d[i] + c0 * k0.d[i];
      am[i] += c2 * k2.m[i] + c1 * k1.m[i] + c0 * k0.m[i];
    }
    for (std::size_t x = 0; x < v; ++x)
      S[x] = normalized(quat_axpy(quat_axpy(quat_axpy(S[x], c2, k2.s[x]), c1, k1.s[x]), c0, k0.s[x]));

    t += h;
    require_finite(ad, t);
    require_finite(am, t);
  }
  r.direct.t = r.modified.t = r.gauge.t = t;
  return r;
}

double check_equivalence(const NoncompactState& direct, const NoncompactState& modified,
                         const GaugePath& S) {
  require_same(direct.a.lattice, modified.a.lattice);
  require_same(direct.a.lattice, S.S.lattice);
  if (std::abs(direct.t - modified.t) > 1e-12 || std::abs(direct.t - S.t) > 1e-12)
    throw Error("check_equivalence needs states at the same time");
  const ConnectionField g = gauge_act(modified.a, S.S);
  return std::sqrt(parallel_max(g.a.size(), [&](std::size_t i) {
    return norm2(g.a[i] - direct.a.a[i]);
  }));
}

ConnectionField smooth_connection(const Lattice& lat, double amplitude) {
  const double k0 = 2.0 * std::numbers::pi / lat.extent(0), k1 = 2.0 * std::numbers::pi / lat.extent(1);
  const double k2 = 2.0 * std::numbers::pi / lat.extent(2), k3 = 2.0 * std::numbers::pi / lat.extent(3);
  return sample_connection(lat, [&](const Position& x, int mu) -> AlgebraElem {
    switch (mu) {
      case 0: return amplitude * AlgebraElem{std::sin(k1 * x[1]), std::cos(k2 * x[2]), 0.3};
      case 1: return amplitude * AlgebraElem{std::sin(k3 * x[3]), 0.2, std::cos(k0 * x[0])};
      case 2: return amplitude * AlgebraElem{0.1, std::sin(k0 * x[0] + k3 * x[3]), std::cos(k1 * x[1])};
      default: return amplitude * AlgebraElem{std::cos(k1 * x[1]), std::sin(k2 * x[2]), std::sin(k0 * x[0])};
    }
  });
}

ConnectionField abelian_mode(const Lattice& lat, double amplitude, int k, int mu) {
  const double q = 2.0 * std::numbers::pi * k / lat.extent(0);
  return sample_connection(lat, [&](const Position& x, int nu) -> AlgebraElem {
    if (nu != mu) return {};
    return {amplitude * std::sin(q * x[0]), 0.0, 0.0};
  });
}

double abelian_decay_rate(const Lattice& lat, int k) {
  const double a = lat.spacing();
  const double s = std::sin(2.0 * std::numbers::pi * k * a / lat.extent(0));
  return s * s / (a * a);
}

double abelian_equivalence_prediction(const Lattice& lat, double amplitude, int k, double t) {
  const double a = lat.spacing();
  const double q = 2.0 * std::numbers::pi * k / lat.extent(0);
  const double lambda = abelian_decay_rate(lat, k);
  const double decay = std::exp(-lambda * t);
  const double grow = lambda > 0.0 ? (1.0 - decay) / lambda : t;
  auto theta = [&](double x) { return amplitude * std::cos(q * x) * std::sin(q * a) / a * grow; };
  double worst = 0.0;
  for (int i = 0; i < lat.dim(0); ++i) {
    const double x = i * a;
    const double th = theta(x);
    const double pure = (std::sin(0.5 * (theta(x + a) - th)) - std::sin(0.5 * (theta(x - a) - th))) / a;
    const double diff = amplitude * decay * std::sin(q * x) - pure - amplitude * std::sin(q * x);
    worst = std::max(worst, std::abs(diff));
  }
  return worst;
}

double noncompact_energy(const ConnectionField& a, double alpha) {
  if (!(alpha >= 1.0)) throw Error("alpha must be >= 1");
  const DensityField f2 = fd_density(fd_curvature(a));
  const double s = a.lattice.spacing();
  return s * s * s * s * parallel_sum(f2.rho.size(), [&](std::size_t x) {
           return std::pow(1.0 + f2.rho[x], alpha);
         });
}

}  // namespace ymflow
