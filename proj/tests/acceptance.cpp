// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ymflow/action.hpp"
#include "ymflow/deturck.hpp"
#include "ymflow/error.hpp"
#include "ymflow/flow.hpp"
#include "ymflow/io.hpp"
#include "ymflow/monitor.hpp"
#include "ymflow/parallel.hpp"

using namespace ymflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Lattice cube(int n, double a = 1.0) { return Lattice({n, n, n, n}, a); }

std::vector<double> plain_density(const GaugeField& U) {
  std::vector<double> r(U.lattice().volume(), 0.0);
  for (std::size_t s = 0; s < r.size(); ++s)
    for (auto [mu, nu] : kPlaneDirs) r[s] += plaquette_density(U, s, mu, nu);
  return r;
}

// ---------------------------------------------------------------------------

Outcome gradient_exactness() {
  const Lattice lat = cube(4);
  const double eps = 1e-5;
  double worst = 0;
  int checks = 0;
  Rng rng(2024);
  for (int f = 0; f < 100; ++f) {
    const GaugeField U = hot_start(lat, 1000 + f, 0.3);
    for (double alpha : {1.0, 1.05, 1.2}) {
      const ForceField Z = force(U, alpha);
      for (int k = 0; k < 2; ++k) {
        const std::size_t s = rng() % lat.volume();
        const int mu = static_cast<int>(rng() % kDim);
        const AlgebraElem X = random_algebra_ball(rng, 1.0);
        GaugeField P = U, M = U;
        P.set_link(s, mu, group_mul(exp_map(eps * X), U.link(s, mu)));
        M.set_link(s, mu, group_mul(exp_map(-eps * X), U.link(s, mu)));
        const std::vector<double> rp = plain_density(P), rm = plain_density(M);
        double dS = 0;
        for (std::size_t x = 0; x < rp.size(); ++x) dS += std::pow(1 + rp[x], alpha) - std::pow(1 + rm[x], alpha);
        const double fd = dS / (2 * eps);
        const double an = inner(X, Z.at(s, mu));
        worst = std::max(worst, std::abs(fd - an) / std::abs(an));
        ++checks;
      }
    }
  }
  return {worst <= 1e-6, fmt("%d directional derivatives, max relative error %.2e (limit 1e-6)", checks, worst)};
}

Outcome energy_identity() {
  FlowParams p;
  p.alpha = 1.1;
  p.dt = 0.001;
  p.t_end = 2.0;
  p.integrator = Integrator::rk3;
  const GaugeField U0 = hot_start(cube(8), 42, 0.3);
  const FlowResult r = run_flow(U0, p);
  const std::vector<TraceRecord>& tr = r.trace;
  bool monotone = true;
  for (std::size_t i = 1; i < tr.size(); ++i) monotone = monotone && tr[i].action <= tr[i - 1].action;
  // composite Simpson over the uniform records (2000 intervals)
  double integral = 0;
  for (std::size_t i = 2; i < tr.size(); i += 2)
    integral += (tr[i].t - tr[i - 2].t) / 6 * (tr[i - 2].dissipation + 4 * tr[i - 1].dissipation + tr[i].dissipation);
  const double dS = tr.front().action - tr.back().action;
  const double budget = 1e-4 * (tr.front().action - vacuum_action(U0.lattice()));
  const bool even = (tr.size() - 1) % 2 == 0;
  return {even && monotone && std::abs(dS - integral) <= budget,
          fmt("dS=%.10g, integral of dissipation=%.10g, |diff|=%.3e (limit %.3e), monotone=%s", dS, integral,
              std::abs(dS - integral), budget, monotone ? "yes" : "no")};
}

Outcome gauge_covariance() {
  const Lattice lat = cube(6);
  const GaugeField U0 = hot_start(lat, 77, 0.5);
  const GaugeTransform g = random_gauge(lat, 78);
  GaugeField U = U0, V = apply_gauge(U0, g);
  for (int i = 0; i < 200; ++i) {
    U = step_rk3(U, 1.1, 0.01);
    V = step_rk3(V, 1.1, 0.01);
  }
  const DensityField a = clover_density(U), b = clover_density(V);
  const DensityField pa = action_density(U), pb = action_density(V);
  double worst = 0;
  for (std::size_t s = 0; s < lat.volume(); ++s)
    worst = std::max({worst, std::abs(a.rho[s] - b.rho[s]), std::abs(pa.rho[s] - pb.rho[s])});
  return {worst <= 1e-9, fmt("max density difference after 200 steps %.2e (limit 1e-9)", worst)};
}

Outcome wilson_reduction() {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const GaugeField U = hot_start(cube(4), seed, 0.2 * static_cast<double>(seed));
    const ForceField Z = force(U, 1.0), W = wilson_force(U);
    for (std::size_t i = 0; i < Z.z.size(); ++i) worst = std::max(worst, std::abs(Z.z[i] - W.z[i]));
  }
  return {worst <= 1e-12, fmt("max |Z - Z_wilson| over 10 fields %.2e (limit 1e-12)", worst)};
}

Outcome deturck_equivalence() {
  double e[2];
  for (int level = 0; level < 2; ++level) {
    const int n = 6 << level;
    const Lattice lat = cube(n, 6.0 / n);
    const PairResult r = evolve_pair(smooth_connection(lat, 0.2), 1.05, 1.0 / (32 << level), 1.0);
    e[level] = check_equivalence(r.direct, r.modified, r.gauge);
  }
  const double ratio = e[0] / e[1];
  double worst = 0;
  for (int n : {8, 12}) {
    const Lattice lat = cube(n, 0.75);
    for (int k : {1, 2, 3}) {
      const ConnectionField a0 = abelian_mode(lat, 0.05, k, 1);
      const double T = 1.0;
      const PairResult r = evolve_pair(a0, 1.0, lat.spacing() * lat.spacing() / 32, T);
      double m0 = 0, m1 = 0;
      for (std::size_t i = 0; i < a0.a.size(); ++i) {
        m0 = std::max(m0, norm(a0.a[i]));
        m1 = std::max(m1, norm(r.direct.a.a[i]));
      }
      const double rate = -std::log(m1 / m0) / T;
      const double lambda = abelian_decay_rate(lat, k);
      worst = std::max(worst, std::abs(rate / lambda - 1));
    }
  }
  return {ratio >= 2.5 && ratio <= 6.0 && worst <= 0.01,
          fmt("equivalence 6^4: %.4e, 12^4: %.4e, ratio %.3f (band [2.5, 6]); abelian decay max rel. error %.2e (limit 1e-2)",
              e[0], e[1], ratio, worst)};
}

Outcome monotonicity_quantity() {
  // flat series on 16^4, R = 8a, cutoff 3L/8
  const Lattice lat = cube(16);
  double worst = 0;
  for (double alpha : {1.0, 1.1}) {
    SnapshotSeries s(lat, alpha);
    for (double t = 0; t <= 256; t += 16) s.push_density(t, DensityField(lat));
    const double phi = phi_alpha(s, lat.site({8, 8, 8, 8}), 256, 8, 6).value;
    worst = std::max(worst, std::abs(phi / (3 * std::pow(8.0, 4 * alpha)) - 1));
  }

  // smooth decaying data on 12^4 and the same data with a blob growing at x0
  const Lattice l12 = cube(12);
  const std::size_t x0 = l12.site({6, 6, 6, 6});
  ConnectionField a = abelian_mode(l12, 0.3, 1, 2);
  const ConnectionField b = smooth_connection(l12, 0.3);
  for (std::size_t i = 0; i < a.a.size(); ++i) a.a[i] += b.a[i];
  SnapshotSeries smooth(l12, 1.1), adversarial(l12, 1.1);
  const double T = 40;
  for (double t = 0; t <= T + 1e-9; t += 0.5) {
    const DensityField d = fd_density(fd_curvature(a));
    DensityField e = d;
    if (t > T - 9 && t < T - 4)
      for (std::size_t x = 0; x < l12.volume(); ++x)
        e.rho[x] += 100 * (t - (T - 9)) * std::exp(-l12.distance2(x0, x) / 2);
    smooth.push_density(t, d);
    adversarial.push_density(t, e);
    if (t < T) a = evolve_pair(a, 1.1, 1.0 / 16, 0.5).direct.a;
  }
  const std::vector<double> radii{1.0, 1.5, 2.0, 3.0};
  const MonotonicityReport ms = check_monotonicity(smooth, x0, T, radii, 4.5);
  const MonotonicityReport ma = check_monotonicity(adversarial, x0, T, radii, 4.5);
  return {worst <= 0.02 && ms.pass && ma.constant > ms.constant,
          fmt("flat phi rel. error %.2e (limit 2e-2); C smooth %.3e (%s at C_cal %.1e), C adversarial %.3e (%s)",
              worst, ms.constant, ms.pass ? "PASS" : "FAIL", kMonotonicityConstant, ma.constant,
              ma.pass ? "PASS" : "FAIL")};
}

Outcome epsilon_regularity() {
  // 32^4: big instanton rho = L/4, small rho = L/16, centers L/2 apart in every direction
  const Lattice lat = cube(32);
  const double L = 32;
  InstantonSpec big, small;
  for (int mu = 0; mu < kDim; ++mu) {
    big.center[mu] = 8.5;
    small.center[mu] = 8.5 + L / 2;
  }
  big.scale = L / 4;
  big.taper_inner = 10;
  big.taper_outer = 15;
  small.scale = L / 16;
  small.taper_inner = 4;
  small.taper_outer = 7;
  const GaugeField U = superpose(instanton(lat, big), instanton(lat, small));
  const double R = L / 8;
  SnapshotSeries s(lat, 1.1);
  const DensityField rho = clover_density(U);
  s.push_density(0.0, rho);
  s.push_density(R * R, rho);

  const std::size_t small_core = lat.site({24, 24, 24, 24}), far = lat.site({8, 8, 24, 24});
  const std::size_t big_core = lat.site({8, 8, 8, 8});
  const ConcentrationReport r = epsilon_detector(s, R, kDefaultEpsilon0);
  std::set<std::size_t> flagged;
  for (const Flag& f : r.flagged) flagged.insert(f.site);
  bool local = true;  // every flag sits on one of the two cores
  for (std::size_t x : flagged) local = local && std::min(lat.distance2(x, small_core), lat.distance2(x, big_core)) <= 64.0;

  bool antitone = true;
  std::set<std::size_t> prev = flagged;
  for (double eps : {0.2, 0.4, 0.8, 1.6}) {
    std::set<std::size_t> cur;
    for (const Flag& f : epsilon_detector(s, R, eps).flagged) cur.insert(f.site);
    antitone = antitone && std::includes(prev.begin(), prev.end(), cur.begin(), cur.end());
    prev = cur;
  }
  double psi_small = 0, psi_big = 0;
  for (const Flag& f : r.flagged) {
    if (f.site == small_core) psi_small = f.psi;
    if (f.site == big_core) psi_big = f.psi;
  }
  const bool ok = flagged.count(small_core) && !flagged.count(far) && local && antitone;
  return {ok, fmt("%zu flagged sites at eps0=%.2f; small core psi=%.3f (%s), big core psi=%.3f, far site %s, "
                  "flags local=%s, antitone=%s",
                  flagged.size(), kDefaultEpsilon0, psi_small, flagged.count(small_core) ? "flagged" : "missed",
                  psi_big, flagged.count(far) ? "flagged" : "clear", local ? "yes" : "no", antitone ? "yes" : "no")};
}

Outcome gap_behaviour();
Outcome alpha_continuation_split();

Outcome infrastructure() {
  const fs::path dir = fs::temp_directory_path() / "ymflow_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const GaugeField U = hot_start(Lattice({6, 4, 5, 4}, 0.5), 9, 1.5);
  io::write_snapshot(dir / "u.ymaf", U, 3.5, 1.05);
  const io::Snapshot back = io::read_snapshot(dir / "u.ymaf");
  const bool round = back.field == U && back.time == 3.5 && back.alpha == 1.05;

  const io::RunConfig c = io::parse_config(
      "lattice: {dims: [6, 6, 6, 6]}\ninitial: {kind: hot, magnitude: 0.4}\n"
      "flow: {alpha: 1.1, dt: 0.01, t_end: 0.3}\nseed: 11\n");
  auto trace = [&](int threads) {
    set_threads(threads);
    std::string out;
    for (const TraceRecord& r : run_flow(io::initial_field(c), c.flow).trace) out += io::trace_line(r) + "\n";
    return out;
  };
  const std::string t1 = trace(1), t2 = trace(1), t3 = trace(2);
  set_threads(threads_from_env());
  const bool deterministic = t1 == t2 && t1 == t3;

  bool rejected = false;
  std::string msg;
  try {
    io::parse_config("flow:\n  alpha: 1.1\n  speed: 2\n");
  } catch (const ConfigError& e) {
    msg = e.what();
    rejected = msg.find("flow.speed") != std::string::npos && msg.find("line 3, column 3") != std::string::npos;
  }
  fs::remove_all(dir);
  return {round && deterministic && rejected,
          fmt("snapshot round trip %s; traces identical (1, 1, 2 threads) %s; unknown key: %s", round ? "bit-identical" : "DIFFERS",
              deterministic ? "yes" : "no", msg.c_str())};
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  set_threads(threads_from_env());
  const std::vector<Criterion> all{
      {1, "gradient exactness", 60, gradient_exactness},
      {2, "energy identity", 300, energy_identity},
      {3, "gauge covariance", 60, gauge_covariance},
      {4, "alpha = 1 reduction", 60, wilson_reduction},
      {5, "DeTurck equivalence", 600, deturck_equivalence},
      {6, "monotonicity quantity", 300, monotonicity_quantity},
      {7, "epsilon-regularity detector", 120, epsilon_regularity},
      {8, "gap behaviour", 900, gap_behaviour},
      {9, "alpha -> 1 continuation", 1800, alpha_continuation_split},
      {10, "infrastructure", 60, infrastructure},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s  [%d] %s: %s (%.1f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

namespace {

// Instanton resolved on the fine lattice: 16^4 at a = 1/4, scale 1, rolled off between 1.2 and 2.
GaugeField resolved_instanton(double scale) {
  const Lattice lat = cube(16, 0.25);
  InstantonSpec sp;
  for (int mu = 0; mu < kDim; ++mu) sp.center[mu] = 0.25 * 8.5;
  sp.scale = scale;
  sp.taper_inner = 1.2;
  sp.taper_outer = 2.0;
  return instanton(lat, sp);
}

Outcome gap_behaviour() {
  const Lattice lat = cube(8);
  int flat = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GapResult g = gap_check(hot_start(lat, seed, 0.05), 1.1, 1e-8);
    flat += g.flat;
    worst = std::max(worst, g.energy / vacuum_action(lat));
  }

  const GaugeField I = resolved_instanton(1.0);
  const double q0 = topological_charge(I);
  CriticalOptions opt;
  opt.dt = opt.dt_max = 0.02;
  opt.max_iterations = 3000;
  const GapResult g = gap_check(I, 1.1, 1e-8, 1e-6, opt);
  const double q1 = topological_charge(g.critical.field);
  const double e = g.energy / kInstantonEnergy;
  const bool ok = flat == 20 && !g.flat && std::abs(q1 - q0) <= 0.05 && std::abs(e - 1) <= 0.2;
  return {ok, fmt("hot starts FLAT %d/20 (max ym/vacuum %.2e); instanton %s, Q %.4f -> %.4f, ym/16pi^2 = %.4f, "
                  "residual %.2e",
                  flat, worst, g.flat ? "FLAT" : "NONFLAT", q0, q1, e, g.critical.residual)};
}
std::string describe(const ContinuationResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const ContinuationEntry& e = r.entries[i];
    out += fmt(" a=%.2f:Q=%.3f,sup=%.3g", e.alpha, e.charge, e.sup_f2);
    if (i > 0) out += fmt(",step=%.3g", r.density_steps[i - 1]);
  }
  return out;
}

Outcome alpha_continuation_split() {
  const std::vector<double> alphas{1.2, 1.1, 1.05, 1.02};

  const GaugeField fine = resolved_instanton(1.0);
  CriticalOptions fo;
  fo.dt = fo.dt_max = 0.02;
  fo.max_iterations = 3000;
  const ContinuationResult res = alpha_continuation(fine, alphas, 1e-6, fo);
  bool cauchy = true, q_stable = true;
  for (std::size_t i = 1; i < res.density_steps.size(); ++i) cauchy = cauchy && res.density_steps[i] < res.density_steps[i - 1];
  for (const ContinuationEntry& e : res.entries) q_stable = q_stable && std::abs(e.charge - res.entries.front().charge) <= 0.05;

  // scale 2a on the unit lattice
  InstantonSpec sp;
  for (int mu = 0; mu < kDim; ++mu) sp.center[mu] = 8.5;
  sp.scale = 2.0;
  sp.taper_inner = 5.0;
  sp.taper_outer = 8.0;
  CriticalOptions co;
  co.dt = co.dt_max = 0.2;
  co.max_iterations = 3000;
  const ContinuationResult und = alpha_continuation(instanton(cube(16), sp), alphas, 1e-6, co);
  bool grows = true;
  for (std::size_t i = 1; i < und.entries.size(); ++i) grows = grows && und.entries[i].sup_f2 > und.entries[i - 1].sup_f2;

  const bool ok = cauchy && q_stable && und.verdict == "concentration" && grows;
  return {ok, fmt("resolved: Cauchy=%s, Q stable=%s, verdict '%s' [", cauchy ? "yes" : "no", q_stable ? "yes" : "no",
                  res.verdict.c_str()) +
                  describe(res) +
                  fmt(" ]; under-resolved: verdict '%s', sup monotone=%s [", und.verdict.c_str(), grows ? "yes" : "no") +
                  describe(und) + " ]"};
}

}  // namespace
