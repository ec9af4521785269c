#include "ymflow/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "ymflow/error.hpp"
#include "ymflow/parallel.hpp"

namespace ymflow {

void SnapshotSeries::push_density(double t, const DensityField& rho) {
  require_same(lattice, rho.lattice);
  if (!times.empty() && !(t > times.back())) throw Error("snapshot times must increase");
  DensityField d(lattice);
  for (std::size_t x = 0; x < d.rho.size(); ++x) d.rho[x] = std::pow(1.0 + rho.rho[x], alpha);
  times.push_back(t);
  densities.push_back(std::move(d));
}

void SnapshotSeries::push(double t, const GaugeField& U) { push_density(t, clover_density(U)); }

namespace {

void require_window(const SnapshotSeries& s, double lo, double hi) {
  if (s.times.empty()) throw WindowNotCovered("empty snapshot series");
  const double slack = 1e-9 * std::max(1.0, std::abs(s.times.back()));
  if (lo < s.times.front() - slack || hi > s.times.back() + slack)
    throw WindowNotCovered("window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] not covered by snapshots [" + std::to_string(s.times.front()) +
                           ", " + std::to_string(s.times.back()) + "]");
}

// Quadrature nodes over [lo, hi]: the endpoints and every snapshot time inside.
std::vector<double> nodes(const SnapshotSeries& s, double lo, double hi) {
  std::vector<double> n{lo};
  for (double t : s.times)
    if (t > lo && t < hi) n.push_back(t);
  if (hi > lo) n.push_back(hi);
  return n;
}

// Linear interpolation of the stored field in time: entries (index, weight).
std::array<std::pair<std::size_t, double>, 2> bracket_time(const SnapshotSeries& s, double t) {
  const auto& ts = s.times;
  if (ts.size() == 1 || t <= ts.front()) return {{{0, 1.0}, {0, 0.0}}};
  if (t >= ts.back()) return {{{ts.size() - 1, 1.0}, {0, 0.0}}};
  const std::size_t i = std::upper_bound(ts.begin(), ts.end(), t) - ts.begin() - 1;
  const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
  return {{{i, 1.0 - w}, {i + 1, w}}};
}

double bump(double r, double cutoff) {
  const double h = 0.5 * cutoff;
  if (r <= h) return 1.0;
  if (r >= cutoff) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (r - h) / h));
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

}  // namespace

PhiValue phi_alpha(const SnapshotSeries& s, std::size_t x0, double t0, double R, double cutoff) {
  const Lattice& lat = s.lattice;
  const double a = lat.spacing();
  double min_extent = lat.extent(0);
  for (int mu = 1; mu < kDim; ++mu) min_extent = std::min(min_extent, lat.extent(mu));
  if (!(R > 0.0)) throw Error("R must be > 0");
  if (!(cutoff > 0.0) || cutoff > 0.5 * min_extent + 1e-12)
    throw Error("cutoff radius must be in (0, L/2]");
  const double lo = t0 - 4.0 * R * R, hi = t0 - R * R;
  require_window(s, lo, hi);

  PhiValue out;
  out.good = R >= a && 4.0 * R * R <= (min_extent / 4.0) * (min_extent / 4.0);

  const std::size_t v = lat.volume();
  std::vector<double> r2(v), bump2(v);
  for (std::size_t x = 0; x < v; ++x) {
    r2[x] = lat.distance2(x0, x);
    const double b = bump(std::sqrt(r2[x]), cutoff);
    bump2[x] = b * b;
  }

  const std::vector<double> t = nodes(s, lo, hi);
  std::vector<double> f(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double tau = t0 - t[k];
    const auto br = bracket_time(s, t[k]);
    const double* d0 = s.densities[br[0].first].rho.data();
    const double* d1 = s.densities[br[1].first].rho.data();
    const double w0 = br[0].second, w1 = br[1].second;
    // The normalization cancels the prefactor (4 pi tau)^-2 and a^4.
    std::vector<double> g(v);
    for (std::size_t x = 0; x < v; ++x) g[x] = bump2[x] * std::exp(-r2[x] / (4.0 * tau));
    const double mass = pairwise_sum(g);
    const double num = parallel_sum(v, [&](std::size_t x) {
      return g[x] * (w0 * d0[x] + w1 * d1[x]);
    });
    f[k] = num / mass;
  }
  out.value = std::pow(R, 4.0 * s.alpha - 2.0) * trapezoid(t, f);
  return out;
}

MonotonicityReport check_monotonicity(const SnapshotSeries& s, std::size_t x0, double t0,
                                      const std::vector<double>& radii, double cutoff,
                                      double c_cal) {
  if (radii.empty()) throw Error("no radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw Error("radii must increase");
  if (s.times.empty()) throw WindowNotCovered("empty snapshot series");

  MonotonicityReport rep;
  rep.radii = radii;
  for (double R : radii) rep.phi.push_back(phi_alpha(s, x0, t0, R, cutoff).value);

  const double a = s.lattice.spacing();
  const double e0 = a * a * a * a * pairwise_sum(s.densities.front().rho);

  for (std::size_t i = 0; i < radii.size(); ++i) {
    for (std::size_t j = i + 1; j < radii.size(); ++j) {
      const double lhs = rep.phi[i];
      const double dR = radii[j] - radii[i], dR2 = radii[j] * radii[j] - radii[i] * radii[i];
      auto rhs = [&](double c) { return c * std::exp(c * dR) * rep.phi[j] + c * dR2 * e0; };
      if (lhs <= 0.0) continue;
      double lo = 0.0, hi = 1.0;
      while (rhs(hi) < lhs) hi *= 2.0;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rhs(mid) < lhs ? lo : hi) = mid;
      }
      rep.constant = std::max(rep.constant, hi);
    }
  }
  rep.pass = rep.constant <= c_cal;
  return rep;
}

namespace {

struct Ball {
  std::vector<Coords> offsets;
};

Ball make_ball(const Lattice& lat, double R) {
  const double a = lat.spacing();
  const int n = static_cast<int>(std::ceil(R / a));
  for (int mu = 0; mu < kDim; ++mu)
    if (2 * n >= lat.dim(mu) + 1) throw Error("ball radius exceeds half the lattice");
  Ball b;
  const double R2 = R * R;
  Coords d;
  for (d[3] = -n; d[3] <= n; ++d[3])
    for (d[2] = -n; d[2] <= n; ++d[2])
      for (d[1] = -n; d[1] <= n; ++d[1])
        for (d[0] = -n; d[0] <= n; ++d[0]) {
          const double r2 = a * a * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
          if (r2 < R2) b.offsets.push_back(d);
        }
  return b;
}

}  // namespace

double flat_baseline(const Lattice& lat, double alpha, double R) {
  const double a = lat.spacing();
  const double count = static_cast<double>(make_ball(lat, R).offsets.size());
  return std::pow(R, 4.0 * alpha - 6.0) * a * a * a * a * count * R * R;
}

std::vector<double> psi_field(const SnapshotSeries& s, double t0, double R) {
  const Lattice& lat = s.lattice;
  const double a = lat.spacing();
  if (!(R > 0.0)) throw Error("R must be > 0");
  require_window(s, t0 - R * R, t0);
  const std::size_t v = lat.volume();

  // time integral of (1+rho)^alpha - 1 per site
  const std::vector<double> t = nodes(s, t0 - R * R, t0);
  std::vector<double> g(v, 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double h = 0.5 * (t[k] - t[k - 1]);
    for (std::size_t e : {k - 1, k}) {
      const auto br = bracket_time(s, t[e]);
      const double* d0 = s.densities[br[0].first].rho.data();
      const double* d1 = s.densities[br[1].first].rho.data();
      const double w0 = br[0].second, w1 = br[1].second;
      for (std::size_t x = 0; x < v; ++x) g[x] += h * (w0 * d0[x] + w1 * d1[x] - 1.0);
    }
  }

  const Ball ball = make_ball(lat, R);
  std::array<std::vector<int>, kDim> coord;
  for (int mu = 0; mu < kDim; ++mu) coord[mu].resize(v);
  for (std::size_t x = 0; x < v; ++x) {
    const Coords c = lat.coords(x);
    for (int mu = 0; mu < kDim; ++mu) coord[mu][x] = c[mu];
  }
  std::array<std::size_t, kDim> stride{1, 0, 0, 0};
  for (int mu = 1; mu < kDim; ++mu) stride[mu] = stride[mu - 1] * lat.dim(mu - 1);

  const double scale = std::pow(R, 4.0 * s.alpha - 6.0) * a * a * a * a / kInstantonEnergy;
  std::vector<double> psi(v, 0.0);
  parallel_for(v, [&](std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      double acc = 0.0;
      for (const Coords& d : ball.offsets) {
        std::size_t y = 0;
        for (int mu = 0; mu < kDim; ++mu) {
          int c = coord[mu][x] + d[mu];
          const int n = lat.dim(mu);
          if (c < 0) c += n;
          else if (c >= n) c -= n;
          y += stride[mu] * static_cast<std::size_t>(c);
        }
        acc += g[y];
      }
      psi[x] = scale * acc;
    }
  });
  return psi;
}

ConcentrationReport epsilon_detector(const SnapshotSeries& s, double R, double epsilon0) {
  ConcentrationReport rep;
  rep.alpha = s.alpha;
  rep.R = R;
  rep.epsilon0 = epsilon0;
  const double slack = 1e-9 * std::max(1.0, std::abs(s.times.empty() ? 0.0 : s.times.back()));
  bool any = false;
  for (double t0 : s.times) {
    if (t0 - R * R < s.times.front() - slack) continue;
    any = true;
    const std::vector<double> psi = psi_field(s, t0, R);
    for (std::size_t x = 0; x < psi.size(); ++x)
      if (psi[x] > epsilon0) rep.flagged.push_back({x, t0, psi[x]});
  }
  if (!any) throw WindowNotCovered("no snapshot time has a covered window of length R^2");
  std::stable_sort(rep.flagged.begin(), rep.flagged.end(),
                   [](const Flag& a, const Flag& b) { return a.psi > b.psi; });
  return rep;
}

std::string report_json(const ConcentrationReport& r, const Lattice& lat) {
  nlohmann::json j;
  j["alpha"] = r.alpha;
  j["R"] = r.R;
  j["epsilon0"] = r.epsilon0;
  j["flagged"] = nlohmann::json::array();
  for (const Flag& f : r.flagged) {
    const Coords c = lat.coords(f.site);
    j["flagged"].push_back({{"site", {c[0], c[1], c[2], c[3]}}, {"t", f.t}, {"psi", f.psi}});
  }
  return j.dump(2);
}

GapResult gap_check(const GaugeField& U, double alpha, double tol, double force_tol,
                    const CriticalOptions& opt) {
  const double threshold = tol * vacuum_action(U.lattice());
  // (1 + rho)^alpha >= 1 + alpha rho, so this excess bounds ym below the threshold
  CriticalOptions o = opt;
  o.stop_excess = std::max(o.stop_excess, alpha * threshold);
  GapResult g{false, 0.0, find_critical(U, alpha, force_tol, o)};
  g.energy = ym_energy(g.critical.field);
  g.flat = g.energy < threshold;
  return g;
}

ContinuationResult alpha_continuation(const GaugeField& U0, const std::vector<double>& alphas,
                                      double tol, const CriticalOptions& opt) {
  if (alphas.empty()) throw Error("no alphas");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 1.0)) throw Error("continuation alphas must be > 1");
    if (i > 0 && !(alphas[i] < alphas[i - 1])) throw Error("alphas must decrease strictly");
  }
  ContinuationResult res;
  GaugeField start = U0;
  for (double alpha : alphas) {
    CriticalResult c = find_critical(start, alpha, tol, opt);
    const Observables o = measure(c.field, alpha);
    ContinuationEntry e{alpha,        c.field, o.action - o.vacuum, o.ym, o.sup_f2, o.charge,
                        c.residual,   c.converged, action_density(c.field)};
    if (!res.entries.empty()) {
      const auto& prev = res.entries.back().density.rho;
      double m = 0.0;
      for (std::size_t x = 0; x < prev.size(); ++x) m = std::max(m, std::abs(prev[x] - e.density.rho[x]));
      res.density_steps.push_back(m);
    }
    start = c.field;
    res.entries.push_back(std::move(e));
  }

  bool sup_grows = res.entries.size() > 1;
  for (std::size_t i = 1; i < res.entries.size(); ++i)
    sup_grows = sup_grows && res.entries[i].sup_f2 > res.entries[i - 1].sup_f2;
  // measured from the start so that a collapse inside the first search still counts
  double drift = 0.0;
  const double q0 = topological_charge(U0);
  for (const ContinuationEntry& e : res.entries) drift = std::max(drift, std::abs(e.charge - q0));
  bool cauchy = true;
  for (std::size_t i = 1; i < res.density_steps.size(); ++i)
    cauchy = cauchy && res.density_steps[i] < res.density_steps[i - 1];
  res.verdict = (drift > 0.05 || (sup_grows && !cauchy)) ? "concentration" : "strong convergence";
  return res;
}

}  // namespace ymflow
