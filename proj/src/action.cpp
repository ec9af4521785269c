#include "ymflow/action.hpp"

#include <cmath>

#include "ymflow/error.hpp"
#include "ymflow/parallel.hpp"

namespace ymflow {

GroupElem plaquette(const GaugeField& U, std::size_t x, int mu, int nu) {
  if (mu == nu) throw Error("plaquette needs mu != nu");
  const Lattice& lat = U.lattice();
  return group_mul(group_mul(group_mul(U.link(x, mu), U.link(lat.up(x, mu), nu)),
                             inverse(U.link(lat.up(x, nu), mu))),
                   inverse(U.link(x, nu)));
}

double plaquette_density(const GaugeField& U, std::size_t x, int mu, int nu) {
  if (!(mu < nu)) throw Error("plaquette_density needs mu < nu");
  const double a = U.lattice().spacing();
  const GroupElem p = plaquette(U, x, mu, nu);
  // 2 - 2 q0 = 2 |v|^2 / (1 + q0) on unit quaternions, free of cancellation near 1
  const double v2 = p.q1 * p.q1 + p.q2 * p.q2 + p.q3 * p.q3;
  const double d = p.q0 > 0.0 ? 2.0 * v2 / (1.0 + p.q0) : 2.0 - 2.0 * p.q0;
  return kKappa / (a * a * a * a) * d;
}

DensityField action_density(const GaugeField& U) {
  DensityField d(U.lattice());
  kernels::active_kernels().action_density(U, d.rho.data());
  return d;
}

double vacuum_action(const Lattice& lat) {
  const double a = lat.spacing();
  return a * a * a * a * static_cast<double>(lat.volume());
}

double alpha_action(const DensityField& d, double alpha) {
  if (!(alpha >= 1.0)) throw Error("alpha must be >= 1");
  const double a = d.lattice.spacing();
  const double* rho = d.rho.data();
  const double s = parallel_sum(d.rho.size(), [&](std::size_t i) {
    return std::pow(1.0 + rho[i], alpha);
  });
  return a * a * a * a * s;
}

double alpha_action(const GaugeField& U, double alpha) {
  if (!(alpha >= 1.0)) throw Error("alpha must be >= 1");
  return alpha_action(action_density(U), alpha);
}

double ym_energy(const DensityField& d) {
  const double a = d.lattice.spacing();
  return a * a * a * a * pairwise_sum(d.rho);
}

double ym_energy(const GaugeField& U) { return ym_energy(action_density(U)); }

CurvatureField clover_curvature(const GaugeField& U) {
  const Lattice& lat = U.lattice();
  CurvatureField F(lat);
  const double a = lat.spacing();
  const double scale = 1.0 / (2.0 * a * a);  // project(Q/4)/a^2 = 2 vec(Q) / (4 a^2)
  parallel_for(lat.volume(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      for (int p = 0; p < kPlanes; ++p) {
        const int mu = kPlaneDirs[p][0], nu = kPlaneDirs[p][1];
        const std::size_t xm = lat.down(x, mu), xn = lat.down(x, nu);
        const std::size_t xpm = lat.up(x, mu), xpn = lat.up(x, nu);
        const std::size_t xmn = lat.down(xm, nu);
        const std::size_t xm_pn = lat.up(xm, nu);
        const std::size_t xn_pm = lat.up(xn, mu);
        // four leaves, all starting and ending at x with the same orientation
        const GroupElem l1 = mul_raw(mul_raw(U.link(x, mu), U.link(xpm, nu)),
                                     mul_raw(inverse(U.link(xpn, mu)), inverse(U.link(x, nu))));
        const GroupElem l2 = mul_raw(mul_raw(U.link(x, nu), inverse(U.link(xm_pn, mu))),
                                     mul_raw(inverse(U.link(xm, nu)), U.link(xm, mu)));
        const GroupElem l3 = mul_raw(mul_raw(inverse(U.link(xm, mu)), inverse(U.link(xmn, nu))),
                                     mul_raw(U.link(xmn, mu), U.link(xn, nu)));
        const GroupElem l4 = mul_raw(mul_raw(inverse(U.link(xn, nu)), U.link(xn, mu)),
                                     mul_raw(U.link(xn_pm, nu), inverse(U.link(x, mu))));
        F.F[x * kPlanes + p] = {scale * (l1.q1 + l2.q1 + l3.q1 + l4.q1),
                                scale * (l1.q2 + l2.q2 + l3.q2 + l4.q2),
                                scale * (l1.q3 + l2.q3 + l3.q3 + l4.q3)};
      }
    }
  });
  return F;
}

DensityField clover_density(const CurvatureField& F) {
  DensityField d(F.lattice);
  for (std::size_t x = 0; x < d.rho.size(); ++x) {
    double s = 0.0;
    for (int p = 0; p < kPlanes; ++p) s += norm2(F.at(x, p));
    d.rho[x] = s;
  }
  return d;
}

DensityField clover_density(const GaugeField& U) { return clover_density(clover_curvature(U)); }

double sup_curvature(const GaugeField& U) {
  const DensityField d = clover_density(U);
  double m = 0.0;
  for (double r : d.rho) m = std::max(m, r);
  return m;
}

double topological_charge(const CurvatureField& F) {
  const double a = F.lattice.spacing();
  // Q = 1/(32 pi^2) sum eps tr(F F) with tr(XY) = -<X,Y>/2, and the eps
  // contraction over all index orders is 8 (F01.F23 - F02.F13 + F03.F12)
  const double q = parallel_sum(F.lattice.volume(), [&](std::size_t x) {
    return inner(F.at(x, 0), F.at(x, 5)) - inner(F.at(x, 1), F.at(x, 4)) +
           inner(F.at(x, 2), F.at(x, 3));
  });
  return -a * a * a * a * q / (8.0 * std::numbers::pi * std::numbers::pi);
}

double topological_charge(const GaugeField& U) { return topological_charge(clover_curvature(U)); }

Observables measure(const GaugeField& U, double alpha) {
  Observables o;
  const DensityField rho = action_density(U);
  o.action = alpha_action(rho, alpha);
  o.vacuum = vacuum_action(U.lattice());
  o.ym = ym_energy(rho);
  const CurvatureField F = clover_curvature(U);
  const DensityField c = clover_density(F);
  for (double r : c.rho) o.sup_f2 = std::max(o.sup_f2, r);
  o.charge = topological_charge(F);
  return o;
}

}  // namespace ymflow
