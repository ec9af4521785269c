#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ymflow/deturck.hpp"
#include "ymflow/error.hpp"

using namespace ymflow;

namespace {

Lattice cube(int n, double a = 1.0) { return Lattice({n, n, n, n}, a); }

double max_diff(const ConnectionField& x, const ConnectionField& y) {
  double m = 0;
  for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, norm(x.a[i] - y.a[i]));
  return m;
}

double max_norm(const ConnectionField& x) {
  double m = 0;
  for (const auto& e : x.a) m = std::max(m, norm(e));
  return m;
}

// Smooth gauge transformation S(x) = exp(sum_k b_k sin(q x_k) T_k).
GaugeTransform smooth_gauge(const Lattice& lat, double b) {
  GaugeTransform S(lat);
  const double q = 2 * std::numbers::pi / lat.extent(0);
  for (std::size_t s = 0; s < lat.volume(); ++s) {
    const Position x = lat.position(s);
    S.g[s] = exp_map({b * std::sin(q * x[0]), b * std::cos(q * x[1]), b * std::sin(q * (x[2] + x[3]))});
  }
  return S;
}

}  // namespace

TEST_CASE("zero data is stationary") {
  const ConnectionField a0(cube(4));
  CHECK(max_norm(direct_alpha_rhs(a0, 1.1)) == 0.0);
  CHECK(max_norm(modified_rhs(a0, 1.1)) == 0.0);
  const PairResult r = evolve_pair(a0, 1.1, 1.0 / 16, 0.5);
  CHECK(check_equivalence(r.direct, r.modified, r.gauge) == 0.0);
  CHECK(r.direct.t == doctest::Approx(0.5));
}

TEST_CASE("constant connection: curvature is the commutator") {
  const Lattice lat = cube(4);
  const AlgebraElem X{0.3, -0.2, 0.5}, Y{-0.1, 0.4, 0.2};
  ConnectionField a(lat);
  for (std::size_t s = 0; s < lat.volume(); ++s) {
    a.at(s, 0) = X;
    a.at(s, 1) = Y;
  }
  const CurvatureField F = fd_curvature(a);
  const AlgebraElem c = bracket(X, Y);
  for (std::size_t s = 0; s < lat.volume(); ++s) {
    CHECK(norm(F.at(s, 0) - c) < 1e-15);
    for (int p = 1; p < kPlanes; ++p) CHECK(norm(F.at(s, p)) == 0.0);
  }
  CHECK(fd_density(F).rho[3] == doctest::Approx(norm2(c)));
}

TEST_CASE("abelian curl converges at second order") {
  const double L = 8, eps = 0.4, q = 2 * std::numbers::pi / L;
  double err[2];
  for (int level = 0; level < 2; ++level) {
    const int n = 8 << level;
    const Lattice lat = cube(n, L / n);
    const ConnectionField a = sample_connection(lat, [&](const Position& x, int mu) {
      return mu == 3 ? AlgebraElem{0, eps * std::sin(q * x[1]), 0} : AlgebraElem{};
    });
    const CurvatureField F = fd_curvature(a);
    double e = 0;
    for (std::size_t s = 0; s < lat.volume(); ++s)
      e = std::max(e, norm(F.at(s, 4) - AlgebraElem{0, eps * q * std::cos(q * lat.position(s)[1]), 0}));
    err[level] = e;
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("pure gauge connections are nearly flat") {
  const Lattice lat = cube(16, 0.5);
  const ConnectionField a = gauge_act(ConnectionField(lat), smooth_gauge(lat, 0.8));
  const DensityField f2 = fd_density(fd_curvature(a));
  double fmax = 0;
  for (double r : f2.rho) fmax = std::max(fmax, std::sqrt(r));
  // |F| against the scale of the derivatives that cancel in it
  const double q = 2 * std::numbers::pi / lat.extent(0);
  MESSAGE("pure gauge ratio ", q * max_norm(a) / fmax);
  CHECK(q * max_norm(a) / fmax > 10);
}

TEST_CASE("alpha correction term against a direct evaluation") {
  const Lattice lat = cube(5, 0.8);
  const ConnectionField a = smooth_connection(lat, 0.7);
  const double alpha = 1.3, h = 0.5 / lat.spacing();
  const ConnectionField d1 = direct_alpha_rhs(a, 1.0), da = direct_alpha_rhs(a, alpha);

  // F and |F|^2 rebuilt here plane by plane with explicit antisymmetry
  auto F = [&](std::size_t x, int mu, int nu) {
    auto d = [&](int m, int n) { return h * (a.at(lat.up(x, m), n) - a.at(lat.down(x, m), n)); };
    return d(mu, nu) - d(nu, mu) + bracket(a.at(x, mu), a.at(x, nu));
  };
  auto f2 = [&](std::size_t x) {
    double s = 0;
    for (int mu = 0; mu < kDim; ++mu)
      for (int nu = 0; nu < kDim; ++nu) s += 0.5 * norm2(F(x, mu, nu));
    return s;
  };
  double worst = 0, scale = 0;
  for (std::size_t x = 0; x < lat.volume(); ++x)
    for (int nu = 0; nu < kDim; ++nu) {
      AlgebraElem c;
      for (int mu = 0; mu < kDim; ++mu)
        c += ((alpha - 1) * h * (f2(lat.up(x, mu)) - f2(lat.down(x, mu))) / (1 + f2(x))) * F(x, mu, nu);
      worst = std::max(worst, norm(da.at(x, nu) - d1.at(x, nu) - c));
      scale = std::max(scale, norm(c));
    }
  CHECK(scale > 1e-3);
  CHECK(worst < 1e-13);

  // the modified field differs by D phi with phi = -sum delta_mu a_mu
  const ConnectionField m = modified_rhs(a, alpha);
  const std::vector<AlgebraElem> phi = gauge_generator(a);
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    AlgebraElem div;
    for (int mu = 0; mu < kDim; ++mu) div += h * (a.at(lat.up(x, mu), mu) - a.at(lat.down(x, mu), mu));
    CHECK(norm(phi[x] + div) < 1e-15);
    for (int nu = 0; nu < kDim; ++nu) {
      const AlgebraElem Dphi = h * (phi[lat.up(x, nu)] - phi[lat.down(x, nu)]) + bracket(a.at(x, nu), phi[x]);
      CHECK(norm(da.at(x, nu) - Dphi - m.at(x, nu)) < 1e-13);
    }
  }
}

TEST_CASE("transverse abelian modes decay at the discrete Laplacian rate") {
  for (int n : {8, 12}) {
    const Lattice lat = cube(n, 0.75);
    const double amp = 0.05, T = 1.0;
    for (int k : {1, 2}) {
      const ConnectionField a0 = abelian_mode(lat, amp, k, 2);
      const PairResult r = evolve_pair(a0, 1.0, lat.spacing() * lat.spacing() / 32, T);
      const double measured = -std::log(max_norm(r.direct.a) / max_norm(a0)) / T;
      const double lambda = abelian_decay_rate(lat, k);
      CHECK(measured == doctest::Approx(lambda).epsilon(0.01));
      // transverse data needs no gauge correction
      CHECK(check_equivalence(r.direct, r.modified, r.gauge) < 1e-12);
    }
  }
}

TEST_CASE("longitudinal abelian mode follows the one-mode prediction") {
  const Lattice lat = cube(8, 0.75);
  for (double t : {0.25, 1.0}) {
    const PairResult r = evolve_pair(abelian_mode(lat, 0.1, 1, 0), 1.05, 1.0 / 64, t);
    const double got = check_equivalence(r.direct, r.modified, r.gauge);
    const double want = abelian_equivalence_prediction(lat, 0.1, 1, t);
    CHECK(got == doctest::Approx(want).epsilon(0.05));
  }
}

TEST_CASE("gauge equivalence improves under refinement") {
  const ConnectionField c = smooth_connection(cube(6), 0.2);
  const PairResult r0 = evolve_pair(c, 1.05, 1.0 / 32, 0.0);
  CHECK(check_equivalence(r0.direct, r0.modified, r0.gauge) == 0.0);

  double e[2];
  for (int level = 0; level < 2; ++level) {
    const int n = 6 << level;
    const Lattice lat = cube(n, 6.0 / n);
    const PairResult r = evolve_pair(smooth_connection(lat, 0.2), 1.05, 1.0 / (32 << level), 0.5);
    e[level] = check_equivalence(r.direct, r.modified, r.gauge);
  }
  MESSAGE("equivalence ", e[0], " ", e[1]);
  CHECK(e[1] < e[0]);
  CHECK(e[0] / e[1] > 2.0);
}

TEST_CASE("noncompact energy decreases along the direct flow") {
  const Lattice lat = cube(6);
  ConnectionField a = smooth_connection(lat, 0.3);
  double E = noncompact_energy(a, 1.05);
  for (int i = 0; i < 5; ++i) {
    a = evolve_pair(a, 1.05, 1.0 / 16, 0.25).direct.a;
    const double E1 = noncompact_energy(a, 1.05);
    CHECK(E1 < E);
    E = E1;
  }
  CHECK(noncompact_energy(ConnectionField(lat), 1.2) == doctest::Approx(1296.0));
}

TEST_CASE("gauge_act and argument checks") {
  const Lattice lat = cube(4);
  const ConnectionField a = smooth_connection(lat, 0.5);
  CHECK(max_diff(gauge_act(a, GaugeTransform(lat)), a) == 0.0);
  // a constant S acts by conjugation only
  GaugeTransform S(lat);
  Rng rng(4);
  const GroupElem g = random_group(rng);
  for (auto& x : S.g) x = g;
  const ConnectionField b = gauge_act(a, S);
  for (std::size_t i = 0; i < a.a.size(); ++i) CHECK(norm(b.a[i] - adjoint(g, a.a[i])) < 1e-14);

  CHECK_THROWS_AS(evolve_pair(a, 1.1, 0.1, 1.0), Error);
  CHECK_THROWS_AS(direct_alpha_rhs(a, 0.5), Error);
  PairResult r = evolve_pair(a, 1.1, 1.0 / 16, 0.125);
  r.gauge.t += 0.1;
  CHECK_THROWS_AS(check_equivalence(r.direct, r.modified, r.gauge), Error);
}
