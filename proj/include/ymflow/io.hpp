#pragma once
// Snapshot files, NDJSON traces and run configuration.
//
// Snapshot layout (little-endian):
//   "YMAF" | u32 version = 1 | u32 dims[4] | f64 spacing | u32 group = 1 (SU2)
//   | f64 flow time | f64 alpha | f64 q0..q3 per link, sites lexicographic
//   (x0 fastest) and mu fastest within a site.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ymflow/flow.hpp"
#include "ymflow/lattice.hpp"

namespace ymflow::io {

struct Snapshot {
  GaugeField field;
  double time = 0.0;
  double alpha = 1.0;
};

void write_snapshot(const std::filesystem::path& path, const GaugeField& U, double time,
                    double alpha);
/// Throws ymflow::Error on malformed files.
Snapshot read_snapshot(const std::filesystem::path& path);

/// All *.ymaf files in a directory, sorted by flow time.
std::vector<Snapshot> read_snapshot_dir(const std::filesystem::path& dir);

/// One JSON object per line, flushed after every record.
class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& path);
  void write(const TraceRecord& r);

 private:
  std::ofstream out_;
};

std::string trace_line(const TraceRecord& r);

struct InstantonConfig {
  std::vector<double> center;  // empty: lattice center shifted to a hypercube center
  double scale = 4.0;
  int charge = 1;
  double taper_inner = -1.0;
  double taper_outer = -1.0;
};

struct InitialConfig {
  std::string kind = "cold";  // cold | hot | instanton | file
  double magnitude = 0.3;
  std::vector<InstantonConfig> instantons;
  std::string path;
};

struct PhiMonitorConfig {
  bool enabled = false;
  std::vector<double> radii;
  double cutoff = -1.0;         // default 3/8 of the shortest extent, capped at L/2
  std::vector<int> center;      // site coordinates; default lattice center
  std::optional<double> t0;     // default: last snapshot time
};

struct EpsilonMonitorConfig {
  bool enabled = false;
  double R = 2.0;
  double epsilon0 = 0.1;
};

struct MonitorsConfig {
  PhiMonitorConfig phi;
  EpsilonMonitorConfig epsilon;
  int snapshots_every = 0;  // in recorded samples; 0 writes only the final snapshot
};

struct OutputConfig {
  std::string trace_path = "trace.ndjson";
  std::string snapshot_dir = "snapshots";
};

struct ContinuationConfig {
  std::vector<double> alphas;
  double tolerance = 1e-6;
  double dt = 0.05;
  double dt_max = 0.2;
  std::int64_t max_iterations = 200000;
};

struct DeturckConfig {
  std::string data = "nonabelian";  // zero | abelian | nonabelian
  int sites = 6;                    // coarse lattice sites per direction
  double extent = 6.0;              // physical side length
  double alpha = 1.05;
  double amplitude = 0.2;
  double dt = 1.0 / 32.0;           // coarse step; the fine run uses dt/2
  double t_end = 1.0;
  double ratio_min = 2.5;
  double ratio_max = 6.0;
};

struct RunConfig {
  std::array<int, 4> dims{8, 8, 8, 8};
  double spacing = 1.0;
  InitialConfig initial;
  FlowParams flow;
  MonitorsConfig monitors;
  OutputConfig output;
  ContinuationConfig continuation;
  DeturckConfig deturck;
  std::uint64_t seed = 1;
};

/// Parses and validates YAML (JSON is accepted as a YAML subset). Unknown
/// keys and type errors raise ConfigError with "line L, column C".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the initial field described by the config.
GaugeField initial_field(const RunConfig& c);

}  // namespace ymflow::io
