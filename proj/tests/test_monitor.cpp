#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <json.hpp>

#include "ymflow/deturck.hpp"
#include "ymflow/error.hpp"
#include "ymflow/monitor.hpp"

using namespace ymflow;

namespace {

Lattice cube(int n, double a = 1.0) { return Lattice({n, n, n, n}, a); }

SnapshotSeries flat_series(const Lattice& lat, double alpha, double t_end, double dt) {
  SnapshotSeries s(lat, alpha);
  for (double t = 0; t <= t_end + 1e-9; t += dt) s.push_density(t, DensityField(lat));
  return s;
}

// A static series holding one field at t = 0 and t = T.
SnapshotSeries static_series(const GaugeField& U, double alpha, double T) {
  SnapshotSeries s(U.lattice(), alpha);
  s.push(0.0, U);
  s.push(T, U);
  return s;
}

GaugeField instanton_at(const Lattice& lat, Coords c, double scale) {
  InstantonSpec sp;
  for (int mu = 0; mu < kDim; ++mu) sp.center[mu] = (c[mu] + 0.5) * lat.spacing();
  sp.scale = scale;
  return instanton(lat, sp);
}

}  // namespace

TEST_CASE("phi_alpha on flat data is 3 R^(4 alpha)") {
  const Lattice lat = cube(16);
  const std::size_t x0 = lat.site({8, 8, 8, 8});
  for (double alpha : {1.0, 1.1}) {
    const SnapshotSeries s = flat_series(lat, alpha, 256, 16);
    const PhiValue v = phi_alpha(s, x0, 256, 8, 6);
    CHECK(std::abs(v.value / (3 * std::pow(8.0, 4 * alpha)) - 1) < 0.02);
    CHECK_FALSE(v.good);  // the kernel at R = 8 a is wider than the box allows
    const PhiValue w = phi_alpha(s, x0, 256, 1.5, 6);
    CHECK(w.good);
    CHECK(w.value == doctest::Approx(3 * std::pow(1.5, 4 * alpha)).epsilon(1e-12));
    CHECK_FALSE(phi_alpha(s, x0, 256, 0.5, 6).good);
  }
  const SnapshotSeries s = flat_series(lat, 1.1, 100, 10);
  CHECK_THROWS_AS(phi_alpha(s, x0, 100, 8, 6), WindowNotCovered);
  CHECK_THROWS_AS(phi_alpha(s, x0, 300, 2, 6), WindowNotCovered);
  CHECK_THROWS_AS(phi_alpha(s, x0, 100, 2, 9), Error);
}

TEST_CASE("phi_alpha weights the density with the backward kernel") {
  // a density spike at x0 raises phi, one far away leaves it almost unchanged
  const Lattice lat = cube(12);
  const std::size_t x0 = lat.site({6, 6, 6, 6}), far = lat.site({0, 0, 0, 0});
  SnapshotSeries near(lat, 1.1), away(lat, 1.1);
  for (double t : {0.0, 2.0, 4.0}) {
    DensityField a(lat), b(lat);
    a.rho[x0] = 5.0;
    b.rho[far] = 5.0;
    near.push_density(t, a);
    away.push_density(t, b);
  }
  const double flat = 3 * std::pow(1.0, 4.4);
  CHECK(phi_alpha(near, x0, 4, 1, 4.5).value > 1.01 * flat);
  CHECK(phi_alpha(away, x0, 4, 1, 4.5).value == doctest::Approx(flat).epsilon(1e-6));
}

TEST_CASE("check_monotonicity") {
  const Lattice lat = cube(8);
  const std::size_t x0 = lat.site({4, 4, 4, 4});
  const std::vector<double> radii{1.0, 1.5, 2.0, 3.0};
  const MonotonicityReport flat = check_monotonicity(flat_series(lat, 1.1, 40, 1), x0, 40, radii, 4);
  CHECK(flat.pass);
  CHECK(flat.constant > 0);
  REQUIRE(flat.phi.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(flat.phi[i] > flat.phi[i - 1]);

  // smooth decaying data, and the same data with a blob growing at x0 inside
  // the R = 2 window but after the R = 3 window closes
  ConnectionField a = smooth_connection(lat, 0.3);
  SnapshotSeries smooth(lat, 1.1), adversarial(lat, 1.1);
  const double T = 40;
  for (double t = 0; t <= T + 1e-9; t += 1.0) {
    const DensityField d = fd_density(fd_curvature(a));
    DensityField e = d;
    if (t > T - 9 && t < T - 4)
      for (std::size_t x = 0; x < lat.volume(); ++x)
        e.rho[x] += 100 * (t - (T - 9)) * std::exp(-lat.distance2(x0, x) / 2);
    smooth.push_density(t, d);
    adversarial.push_density(t, e);
    if (t < T) a = evolve_pair(a, 1.1, 1.0 / 16, 1.0).direct.a;
  }
  const MonotonicityReport ms = check_monotonicity(smooth, x0, T, radii, 4);
  const MonotonicityReport ma = check_monotonicity(adversarial, x0, T, radii, 4);
  MESSAGE("C flat ", flat.constant, " smooth ", ms.constant, " adversarial ", ma.constant);
  CHECK(ms.pass);
  CHECK(ma.constant > ms.constant);
  CHECK_FALSE(ma.pass);
  CHECK_THROWS_AS(check_monotonicity(smooth, x0, T, {2.0, 1.0}, 4), Error);
}

TEST_CASE("flat baseline approaches the Euclidean cylinder volume") {
  for (double alpha : {1.0, 1.1}) {
    for (double R : {8.0, 10.0}) {
      const Lattice lat = cube(R > 8 ? 22 : 18);
      const double closed = std::numbers::pi * std::numbers::pi / 2 * std::pow(R, 4 * alpha);
      CHECK(std::abs(flat_baseline(lat, alpha, R) / closed - 1) < 0.03);
    }
    const double a = 0.25;
    CHECK(std::abs(flat_baseline(cube(18, a), alpha, 8 * a) /
                       (std::numbers::pi * std::numbers::pi / 2 * std::pow(8 * a, 4 * alpha)) -
                   1) < 0.03);
  }
  CHECK_THROWS_AS(flat_baseline(cube(8), 1.0, 5.0), Error);
}

TEST_CASE("epsilon detector: flat data, instanton core, antitone flags") {
  const Lattice lat4 = cube(6);
  CHECK(epsilon_detector(flat_series(lat4, 1.1, 4, 1), 2, 0.1).flagged.empty());
  CHECK_THROWS_AS(epsilon_detector(flat_series(lat4, 1.1, 1, 1), 2, 0.1), WindowNotCovered);

  const Lattice lat = cube(16);
  const GaugeField U = instanton_at(lat, {8, 8, 8, 8}, 1.5);
  const SnapshotSeries s = static_series(U, 1.1, 9);
  const ConcentrationReport r = epsilon_detector(s, 3, kDefaultEpsilon0);
  REQUIRE_FALSE(r.flagged.empty());
  const Flag& top = r.flagged.front();
  CHECK(lat.distance2(top.site, lat.site({8, 8, 8, 8})) <= 3.0 + 1e-12);
  CHECK(top.t == 9.0);
  for (std::size_t i = 1; i < r.flagged.size(); ++i) {
    CHECK(r.flagged[i].psi <= r.flagged[i - 1].psi);
    CHECK(r.flagged[i].psi > kDefaultEpsilon0);
  }
  // the corner is outside the instanton support and its R-ball
  const std::vector<double> psi = psi_field(s, 9, 3);
  CHECK(psi[lat.site({0, 0, 0, 0})] == 0.0);

  std::set<std::size_t> prev;
  for (const Flag& f : r.flagged) prev.insert(f.site);
  for (double eps : {0.2, 0.4, 0.8, 1.6}) {
    const ConcentrationReport q = epsilon_detector(s, 3, eps);
    std::set<std::size_t> cur;
    for (const Flag& f : q.flagged) cur.insert(f.site);
    CHECK(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
    prev = cur;
  }
}

TEST_CASE("psi: direct evaluation and scale invariance at alpha = 1") {
  const Lattice lat = cube(12);
  const GaugeField U = instanton_at(lat, {6, 6, 6, 6}, 1.5);
  const double R = 2.5;
  for (double alpha : {1.0, 1.1}) {
    const SnapshotSeries s = static_series(U, alpha, R * R);
    const std::vector<double> psi = psi_field(s, R * R, R);
    const DensityField rho = clover_density(U);
    const std::size_t x0 = lat.site({6, 6, 6, 6});
    double sum = 0;
    for (std::size_t x = 0; x < lat.volume(); ++x)
      if (lat.distance2(x0, x) < R * R) sum += std::pow(1 + rho.rho[x], alpha) - 1;
    const double direct = std::pow(R, 4 * alpha - 6) * R * R * sum / kInstantonEnergy;
    CHECK(psi[x0] == doctest::Approx(direct).epsilon(1e-12));
  }
  // the same configuration at half the spacing, scale and radius
  const Lattice half = cube(12, 0.5);
  const GaugeField V = instanton_at(half, {6, 6, 6, 6}, 0.75);
  const std::size_t c = lat.site({6, 6, 6, 6});
  const double p1 = psi_field(static_series(U, 1.0, R * R), R * R, R)[c];
  const double p2 = psi_field(static_series(V, 1.0, R * R / 4), R * R / 4, R / 2)[c];
  CHECK(p2 == doctest::Approx(p1).epsilon(1e-10));
  const double q1 = psi_field(static_series(U, 1.1, R * R), R * R, R)[c];
  const double q2 = psi_field(static_series(V, 1.1, R * R / 4), R * R / 4, R / 2)[c];
  CHECK(q2 < q1);  // (1 + rho)^alpha breaks the scale invariance
}

TEST_CASE("monitors depend only on densities") {
  const Lattice lat = cube(8);
  const GaugeField U = hot_start(lat, 3, 0.5);
  const GaugeField V = apply_gauge(U, random_gauge(lat, 4));
  const DensityField d = clover_density(U);
  SnapshotSeries a(lat, 1.1), b(lat, 1.1), c(lat, 1.1);
  for (double t : {0.0, 2.0, 4.0, 6.0}) {
    a.push_density(t, d);
    b.push_density(t, d);
    c.push(t, V);
  }
  const std::size_t x0 = 100;
  CHECK(phi_alpha(a, x0, 6, 1, 4).value == phi_alpha(b, x0, 6, 1, 4).value);
  CHECK(psi_field(a, 6, 2) == psi_field(b, 6, 2));
  CHECK(phi_alpha(c, x0, 6, 1, 4).value == doctest::Approx(phi_alpha(a, x0, 6, 1, 4).value).epsilon(1e-10));
  const std::vector<double> pa = psi_field(a, 6, 2), pc = psi_field(c, 6, 2);
  for (std::size_t x = 0; x < pa.size(); ++x) CHECK(pc[x] == doctest::Approx(pa[x]).epsilon(1e-10));
  CHECK_THROWS_AS(a.push_density(6.0, d), Error);
}

TEST_CASE("report json") {
  const Lattice lat = cube(4);
  ConcentrationReport r;
  r.alpha = 1.1;
  r.R = 2;
  r.epsilon0 = 0.1;
  r.flagged.push_back({lat.site({1, 2, 3, 0}), 4.0, 0.5});
  const nlohmann::json j = nlohmann::json::parse(report_json(r, lat));
  CHECK(j["alpha"] == 1.1);
  CHECK(j["R"] == 2.0);
  CHECK(j["epsilon0"] == 0.1);
  CHECK(j["flagged"][0]["site"] == nlohmann::json({1, 2, 3, 0}));
  CHECK(j["flagged"][0]["t"] == 4.0);
  CHECK(j["flagged"][0]["psi"] == 0.5);
}

TEST_CASE("gap check and continuation on small data") {
  const Lattice lat = cube(4);
  const GapResult cold = gap_check(cold_start(lat), 1.1, 1e-8);
  CHECK(cold.flat);
  CHECK(cold.energy == 0.0);
  CHECK(cold.critical.iterations == 0);

  const GapResult hot = gap_check(hot_start(lat, 5, 0.05), 1.1, 1e-8);
  CHECK(hot.flat);
  CHECK(hot.energy < 1e-8 * 256);

  const ContinuationResult c = alpha_continuation(cold_start(lat), {1.2, 1.1, 1.05}, 1e-8);
  REQUIRE(c.entries.size() == 3);
  for (const ContinuationEntry& e : c.entries) {
    CHECK(e.action_minus_vacuum == 0.0);
    CHECK(e.sup_f2 == 0.0);
    CHECK(e.converged);
  }
  CHECK(c.verdict == "strong convergence");
  CHECK_THROWS_AS(alpha_continuation(cold_start(lat), {1.1, 1.2}, 1e-8), Error);
  CHECK_THROWS_AS(alpha_continuation(cold_start(lat), {1.1, 1.0}, 1e-8), Error);
}
