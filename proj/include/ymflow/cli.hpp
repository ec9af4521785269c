#pragma once
// Subcommand drivers behind tools/ymflow. Each returns the process exit code:
//   0 success, 1 configuration error, 2 step collapse, 3 non-finite field,
//   4 monitor window not covered, 5 verification outside its tolerance band.

#include <cstdint>
#include <optional>
#include <string>

namespace ymflow::cli {

enum Exit : int {
  kOk = 0,
  kConfig = 1,
  kStepCollapse = 2,
  kNonFinite = 3,
  kWindow = 4,
  kVerifyFailed = 5,
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

int cli_run(const Options& o);
int cli_compare_alpha(const Options& o);
int cli_deturck_verify(const Options& o);
int cli_monitor(const Options& o);

}  // namespace ymflow::cli
