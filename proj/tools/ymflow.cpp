// Command-line driver: ymflow {run|compare-alpha|deturck-verify|monitor} --config PATH

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "ymflow/cli.hpp"
#include "ymflow/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lattice Yang-Mills alpha-flow on the 4-torus"};
  app.require_subcommand(1);

  ymflow::cli::Options opt;
  std::uint64_t seed = 0;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Run configuration (YAML or JSON)")->required();
    sub->add_option("--seed", seed, "Override the configured seed");
    sub->add_option("--threads", threads, "Worker threads (fallback: YMFLOW_THREADS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
  };
  CLI::App* run = app.add_subcommand("run", "Integrate the flow, write trace and snapshots");
  CLI::App* cmp = app.add_subcommand("compare-alpha", "Warm-started critical points as alpha -> 1");
  CLI::App* dtk = app.add_subcommand("deturck-verify", "Gauge equivalence of the modified flow");
  CLI::App* mon = app.add_subcommand("monitor", "Monotonicity and concentration diagnostics");
  for (CLI::App* s : {run, cmp, dtk, mon}) add_common(s);

  CLI11_PARSE(app, argc, argv);

  CLI::App* used = app.get_subcommands().front();
  if (used->count("--seed")) opt.seed = seed;
  ymflow::set_threads(threads > 0 ? threads : ymflow::threads_from_env());

  if (used == run) return ymflow::cli::cli_run(opt);
  if (used == cmp) return ymflow::cli::cli_compare_alpha(opt);
  if (used == dtk) return ymflow::cli::cli_deturck_verify(opt);
  return ymflow::cli::cli_monitor(opt);
}
