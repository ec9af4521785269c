#include "ymflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "ymflow/deturck.hpp"
#include "ymflow/error.hpp"
#include "ymflow/flow.hpp"
#include "ymflow/io.hpp"
#include "ymflow/monitor.hpp"

namespace ymflow::cli {

namespace fs = std::filesystem;

namespace {

io::RunConfig load(const Options& o) {
  io::RunConfig c = io::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  return c;
}

fs::path prepare_out(const Options& o) {
  const fs::path out(o.out);
  fs::create_directories(out);
  return out;
}

// Runs `body`, mapping the library's failure modes to exit codes.
int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const StepCollapse& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kStepCollapse;
  } catch (const NonFinite& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kNonFinite;
  } catch (const WindowNotCovered& e) {
    std::fprintf(stderr, "monitor window not covered: %s\n", e.what());
    return kWindow;
  }
}

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.ymaf", index);
  return buf;
}

}  // namespace

int cli_run(const Options& o) {
  return guarded([&] {
    const io::RunConfig c = load(o);
    const fs::path out = prepare_out(o);
    if (c.flow.alpha - 1.0 > 1.0)
      std::fprintf(stderr, "warning: alpha - 1 = %g is outside the small-alpha regime\n", c.flow.alpha - 1.0);
    const GaugeField U0 = io::initial_field(c);

    const fs::path snap_dir = out / c.output.snapshot_dir;
    if (c.monitors.snapshots_every > 0) fs::create_directories(snap_dir);
    io::TraceWriter trace(out / c.output.trace_path);
    std::size_t records = 0, snaps = 0;
    auto observer = [&](const TraceRecord& r, const GaugeField& U) {
      trace.write(r);
      if (c.monitors.snapshots_every > 0 && records % c.monitors.snapshots_every == 0)
        io::write_snapshot(snap_dir / snapshot_name(snaps++), U, r.t, c.flow.alpha);
      ++records;
    };

    try {
      const FlowResult res = run_flow(U0, c.flow, observer);
      io::write_snapshot(out / "final.ymaf", res.field, res.trace.back().t, c.flow.alpha);
      const TraceRecord& last = res.trace.back();
      std::printf("t=%g action=%.12g ym=%.12g sup_f2=%.6g charge=%.6f\n", last.t, last.action,
                  last.ym, last.sup_f2, last.charge);
      return static_cast<int>(kOk);
    } catch (const FlowStepCollapse& e) {
      const double t = e.state.trace.empty() ? 0.0 : e.state.trace.back().t;
      io::write_snapshot(out / "final.ymaf", e.state.field, t, c.flow.alpha);
      std::fprintf(stderr, "%s; last accepted state saved to final.ymaf\n", e.what());
      return static_cast<int>(kStepCollapse);
    }
  });
}

int cli_compare_alpha(const Options& o) {
  return guarded([&] {
    const io::RunConfig c = load(o);
    if (c.continuation.alphas.empty()) throw ConfigError("continuation.alphas: required for compare-alpha");
    const fs::path out = prepare_out(o);
    const GaugeField U0 = io::initial_field(c);
    CriticalOptions opt;
    opt.dt = c.continuation.dt;
    opt.dt_max = c.continuation.dt_max;
    opt.max_iterations = c.continuation.max_iterations;
    const ContinuationResult r = alpha_continuation(U0, c.continuation.alphas, c.continuation.tolerance, opt);

    std::ofstream csv(out / "compare_alpha.csv");
    csv << "alpha,action_minus_vacuum,ym,sup_f2,charge,residual\n";
    csv.precision(12);
    for (const ContinuationEntry& e : r.entries) {
      csv << e.alpha << ',' << e.action_minus_vacuum << ',' << e.ym << ',' << e.sup_f2 << ','
          << e.charge << ',' << e.residual << '\n';
      std::printf("alpha=%g S-vac=%.8g ym=%.8g sup_f2=%.6g Q=%.5f residual=%.3g%s\n", e.alpha,
                  e.action_minus_vacuum, e.ym, e.sup_f2, e.charge, e.residual,
                  e.converged ? "" : " (not converged)");
    }
    std::ofstream(out / "verdict.txt") << r.verdict << '\n';
    std::printf("verdict: %s\n", r.verdict.c_str());
    return static_cast<int>(kOk);
  });
}

int cli_deturck_verify(const Options& o) {
  return guarded([&] {
    const io::RunConfig c = load(o);
    const io::DeturckConfig& d = c.deturck;
    double norms[2] = {0.0, 0.0};
    double predicted[2] = {0.0, 0.0};
    for (int level = 0; level < 2; ++level) {
      const int n = d.sites << level;
      const Lattice lat({n, n, n, n}, d.extent / n);
      ConnectionField a0(lat);
      if (d.data == "abelian") a0 = abelian_mode(lat, d.amplitude, 1, 0);
      if (d.data == "nonabelian") a0 = smooth_connection(lat, d.amplitude);
      const double dt = d.dt / (1 << level);
      const PairResult r = evolve_pair(a0, d.alpha, dt, d.t_end);
      norms[level] = check_equivalence(r.direct, r.modified, r.gauge);
      if (d.data == "abelian") predicted[level] = abelian_equivalence_prediction(lat, d.amplitude, 1, d.t_end);
      std::printf("sites=%d a=%g dt=%g equivalence=%.6e", n, lat.spacing(), dt, norms[level]);
      if (d.data == "abelian") std::printf(" predicted=%.6e", predicted[level]);
      std::printf("\n");
    }
    if (d.data == "zero") return static_cast<int>(norms[0] == 0.0 && norms[1] == 0.0 ? kOk : kVerifyFailed);
    if (d.data == "abelian") {
      bool ok = true;
      for (int level = 0; level < 2; ++level)
        ok = ok && std::abs(norms[level] - predicted[level]) <= 0.05 * predicted[level];
      return static_cast<int>(ok ? kOk : kVerifyFailed);
    }
    const double ratio = norms[0] / norms[1];
    const bool ok = ratio >= d.ratio_min && ratio <= d.ratio_max;
    std::printf("refinement ratio %.4f (band [%g, %g]) %s\n", ratio, d.ratio_min, d.ratio_max,
                ok ? "consistent" : "inconsistent");
    return static_cast<int>(ok ? kOk : kVerifyFailed);
  });
}

int cli_monitor(const Options& o) {
  return guarded([&] {
    const io::RunConfig c = load(o);
    const fs::path out = prepare_out(o);
    const fs::path dir = out / c.output.snapshot_dir;
    if (!fs::is_directory(dir)) throw WindowNotCovered("no snapshot directory " + dir.string());
    const std::vector<io::Snapshot> snaps = io::read_snapshot_dir(dir);
    if (snaps.empty()) throw WindowNotCovered("no snapshots in " + dir.string());

    const Lattice& lat = snaps.front().field.lattice();
    SnapshotSeries s(lat, snaps.front().alpha);
    for (const io::Snapshot& sn : snaps) {
      require_same(lat, sn.field.lattice());
      if (s.times.empty() || sn.time > s.times.back()) s.push(sn.time, sn.field);
    }
    std::printf("%zu snapshots, t in [%g, %g], alpha=%g\n", s.times.size(), s.times.front(),
                s.times.back(), s.alpha);

    if (c.monitors.phi.enabled) {
      const io::PhiMonitorConfig& p = c.monitors.phi;
      Coords center;
      for (int mu = 0; mu < kDim; ++mu) center[mu] = p.center.empty() ? lat.dim(mu) / 2 : p.center[mu];
      double lmin = lat.extent(0);
      for (int mu = 1; mu < kDim; ++mu) lmin = std::min(lmin, lat.extent(mu));
      const double cutoff = p.cutoff > 0.0 ? p.cutoff : 0.375 * lmin;
      const double t0 = p.t0.value_or(s.times.back());
      const std::size_t x0 = lat.site(center);
      for (double R : p.radii) {
        const PhiValue v = phi_alpha(s, x0, t0, R, cutoff);
        std::printf("phi(R=%g) = %.8g  closed form flat %.8g%s\n", R, v.value,
                    3.0 * std::pow(R, 4.0 * s.alpha), v.good ? "" : "  [quality: poor]");
      }
      if (p.radii.size() > 1) {
        const MonotonicityReport m = check_monotonicity(s, x0, t0, p.radii, cutoff);
        std::printf("monotonicity constant C = %.6g (C_cal = %g) %s\n", m.constant,
                    kMonotonicityConstant, m.pass ? "PASS" : "FAIL");
      }
    }
    if (c.monitors.epsilon.enabled) {
      const ConcentrationReport r = epsilon_detector(s, c.monitors.epsilon.R, c.monitors.epsilon.epsilon0);
      std::ofstream(out / "report.json") << report_json(r, lat) << '\n';
      std::printf("%zu flagged points (R=%g, epsilon0=%g); report.json written\n", r.flagged.size(),
                  r.R, r.epsilon0);
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace ymflow::cli
