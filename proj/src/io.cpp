#include "ymflow/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "ymflow/error.hpp"

namespace ymflow::io {

namespace {

constexpr char kMagic[4] = {'Y', 'M', 'A', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kGroupSU2 = 1;

template <class T>
void put(std::vector<char>& buf, T v) {
  static_assert(std::is_arithmetic_v<T>);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  buf.insert(buf.end(), b, b + sizeof(T));
}

template <class T>
T take(const std::vector<char>& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw Error("snapshot truncated");
  char b[sizeof(T)];
  std::memcpy(b, buf.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const GaugeField& U, double time,
                    double alpha) {
  const Lattice& lat = U.lattice();
  std::vector<char> buf(kMagic, kMagic + 4);
  put<std::uint32_t>(buf, kVersion);
  for (int mu = 0; mu < kDim; ++mu) put<std::uint32_t>(buf, static_cast<std::uint32_t>(lat.dim(mu)));
  put<double>(buf, lat.spacing());
  put<std::uint32_t>(buf, kGroupSU2);
  put<double>(buf, time);
  put<double>(buf, alpha);
  buf.reserve(buf.size() + lat.volume() * kDim * 4 * sizeof(double));
  for (std::size_t x = 0; x < lat.volume(); ++x)
    for (int mu = 0; mu < kDim; ++mu) {
      const GroupElem g = U.link(x, mu);
      put(buf, g.q0);
      put(buf, g.q1);
      put(buf, g.q2);
      put(buf, g.q3);
    }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw Error(path.string() + ": not a YMAF snapshot");
  std::size_t pos = 4;
  if (take<std::uint32_t>(buf, pos) != kVersion) throw Error(path.string() + ": unsupported version");
  Coords dims;
  for (int mu = 0; mu < kDim; ++mu) dims[mu] = static_cast<int>(take<std::uint32_t>(buf, pos));
  const double spacing = take<double>(buf, pos);
  if (take<std::uint32_t>(buf, pos) != kGroupSU2) throw Error(path.string() + ": unsupported group");
  const double time = take<double>(buf, pos);
  const double alpha = take<double>(buf, pos);
  Lattice lat(dims, spacing);
  if (buf.size() - pos != lat.volume() * kDim * 4 * sizeof(double))
    throw Error(path.string() + ": payload length mismatch");
  Snapshot s{GaugeField(lat), time, alpha};
  for (std::size_t x = 0; x < lat.volume(); ++x)
    for (int mu = 0; mu < kDim; ++mu) {
      GroupElem g;
      g.q0 = take<double>(buf, pos);
      g.q1 = take<double>(buf, pos);
      g.q2 = take<double>(buf, pos);
      g.q3 = take<double>(buf, pos);
      s.field.set_link(x, mu, g);
    }
  return s;
}

std::vector<Snapshot> read_snapshot_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("no snapshot directory " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".ymaf") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Snapshot> out;
  for (const auto& f : files) out.push_back(read_snapshot(f));
  std::stable_sort(out.begin(), out.end(),
                   [](const Snapshot& a, const Snapshot& b) { return a.time < b.time; });
  return out;
}

std::string trace_line(const TraceRecord& r) {
  nlohmann::json j{{"t", r.t},           {"action", r.action},           {"ym", r.ym},
                   {"sup_f2", r.sup_f2}, {"charge", r.charge},           {"dissipation", r.dissipation},
                   {"dt_used", r.dt_used}};
  return j.dump();
}

TraceWriter::TraceWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
  if (!out_) throw Error("cannot write " + path.string());
}

void TraceWriter::write(const TraceRecord& r) {
  out_ << trace_line(r) << '\n';
  out_.flush();
}

// ---------------------------------------------------------------------------
// configuration

namespace {

std::string where(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg + where(n));
}

void require_map(const YAML::Node& n, const std::string& path, const std::set<std::string>& keys) {
  if (!n.IsMap()) fail(n, path, "expected a mapping");
  for (const auto& kv : n) {
    const std::string k = kv.first.as<std::string>();
    if (!keys.count(k)) {
      const YAML::Node key = kv.first;
      fail(key, path.empty() ? k : path + "." + k, "unknown key");
    }
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <class T>
T scalar(const YAML::Node& n, const std::string& path, const char* what) {
  if (!n.IsScalar()) fail(n, path, std::string("expected ") + what);
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, path, std::string("expected ") + what);
  }
}

double real(const YAML::Node& n, const std::string& p) { return scalar<double>(n, p, "a number"); }
long long integer(const YAML::Node& n, const std::string& p) {
  return scalar<long long>(n, p, "an integer");
}
bool flag(const YAML::Node& n, const std::string& p) { return scalar<bool>(n, p, "true or false"); }
std::string text(const YAML::Node& n, const std::string& p) {
  return scalar<std::string>(n, p, "a string");
}

std::vector<double> reals(const YAML::Node& n, const std::string& p) {
  if (!n.IsSequence()) fail(n, p, "expected a list of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < n.size(); ++i) v.push_back(real(n[i], p + "[" + std::to_string(i) + "]"));
  return v;
}

std::vector<int> ints(const YAML::Node& n, const std::string& p) {
  if (!n.IsSequence()) fail(n, p, "expected a list of integers");
  std::vector<int> v;
  for (std::size_t i = 0; i < n.size(); ++i)
    v.push_back(static_cast<int>(integer(n[i], p + "[" + std::to_string(i) + "]")));
  return v;
}

void check(bool ok, const YAML::Node& n, const std::string& p, const std::string& msg) {
  if (!ok) fail(n, p, msg);
}

InstantonConfig parse_instanton(const YAML::Node& n, const std::string& p) {
  require_map(n, p, {"center", "scale", "charge", "taper_inner", "taper_outer"});
  InstantonConfig c;
  if (n["center"]) {
    c.center = reals(n["center"], join(p, "center"));
    check(c.center.size() == 4, n["center"], join(p, "center"), "expected 4 coordinates");
  }
  if (n["scale"]) c.scale = real(n["scale"], join(p, "scale"));
  check(c.scale > 0.0, n, join(p, "scale"), "must be > 0");
  if (n["charge"]) c.charge = static_cast<int>(integer(n["charge"], join(p, "charge")));
  check(c.charge == 1 || c.charge == -1, n, join(p, "charge"), "must be +1 or -1");
  if (n["taper_inner"]) c.taper_inner = real(n["taper_inner"], join(p, "taper_inner"));
  if (n["taper_outer"]) c.taper_outer = real(n["taper_outer"], join(p, "taper_outer"));
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& src) {
  YAML::Node root;
  try {
    root = YAML::Load(src);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error: " + e.msg + " (line " + std::to_string(e.mark.line + 1) +
                      ", column " + std::to_string(e.mark.column + 1) + ")");
  }
  RunConfig c;
  if (root.IsNull()) return c;
  require_map(root, "", {"lattice", "initial", "flow", "monitors", "output", "seed",
                         "continuation", "deturck"});

  if (const YAML::Node n = root["seed"]) {
    const long long s = integer(n, "seed");
    check(s >= 0, n, "seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }

  if (const YAML::Node n = root["lattice"]) {
    require_map(n, "lattice", {"dims", "spacing"});
    if (n["dims"]) {
      const std::vector<int> d = ints(n["dims"], "lattice.dims");
      check(d.size() == 4, n["dims"], "lattice.dims", "expected 4 extents");
      for (int mu = 0; mu < 4; ++mu) {
        check(d[mu] >= 4, n["dims"], "lattice.dims", "every extent must be >= 4");
        c.dims[mu] = d[mu];
      }
    }
    if (n["spacing"]) c.spacing = real(n["spacing"], "lattice.spacing");
    check(c.spacing > 0.0, n, "lattice.spacing", "must be > 0");
  }

  if (const YAML::Node n = root["initial"]) {
    require_map(n, "initial", {"kind", "magnitude", "instantons", "path"});
    if (n["kind"]) c.initial.kind = text(n["kind"], "initial.kind");
    const std::string& k = c.initial.kind;
    check(k == "cold" || k == "hot" || k == "instanton" || k == "file", n["kind"] ? n["kind"] : n,
          "initial.kind", "must be cold, hot, instanton or file");
    if (n["magnitude"]) c.initial.magnitude = real(n["magnitude"], "initial.magnitude");
    check(c.initial.magnitude >= 0.0, n, "initial.magnitude", "must be >= 0");
    if (n["instantons"]) {
      const YAML::Node l = n["instantons"];
      check(l.IsSequence(), l, "initial.instantons", "expected a list");
      for (std::size_t i = 0; i < l.size(); ++i)
        c.initial.instantons.push_back(parse_instanton(l[i], "initial.instantons[" + std::to_string(i) + "]"));
    }
    if (n["path"]) c.initial.path = text(n["path"], "initial.path");
    if (k == "instanton" && c.initial.instantons.empty()) c.initial.instantons.emplace_back();
    check(k != "file" || !c.initial.path.empty(), n, "initial.path", "required for kind file");
  }

  if (const YAML::Node n = root["flow"]) {
    require_map(n, "flow", {"alpha", "dt", "t_end", "integrator", "adaptive", "tolerance",
                            "record_every"});
    FlowParams& f = c.flow;
    if (n["alpha"]) f.alpha = real(n["alpha"], "flow.alpha");
    if (n["dt"]) f.dt = real(n["dt"], "flow.dt");
    if (n["t_end"]) f.t_end = real(n["t_end"], "flow.t_end");
    if (n["integrator"]) {
      const std::string s = text(n["integrator"], "flow.integrator");
      check(s == "euler" || s == "rk3", n["integrator"], "flow.integrator", "must be euler or rk3");
      f.integrator = s == "euler" ? Integrator::euler : Integrator::rk3;
    }
    if (n["adaptive"]) f.adaptive = flag(n["adaptive"], "flow.adaptive");
    if (n["tolerance"]) f.tolerance = real(n["tolerance"], "flow.tolerance");
    if (n["record_every"]) f.record_every = static_cast<int>(integer(n["record_every"], "flow.record_every"));
    try {
      validate(f);
    } catch (const Error& e) {
      fail(n, "flow", e.what());
    }
  }

  if (const YAML::Node n = root["monitors"]) {
    require_map(n, "monitors", {"phi", "epsilon", "snapshots_every"});
    if (const YAML::Node p = n["phi"]) {
      require_map(p, "monitors.phi", {"enabled", "radii", "cutoff", "center", "t0"});
      PhiMonitorConfig& m = c.monitors.phi;
      if (p["enabled"]) m.enabled = flag(p["enabled"], "monitors.phi.enabled");
      if (p["radii"]) m.radii = reals(p["radii"], "monitors.phi.radii");
      for (std::size_t i = 0; i < m.radii.size(); ++i)
        check(m.radii[i] > 0.0 && (i == 0 || m.radii[i] > m.radii[i - 1]), p["radii"],
              "monitors.phi.radii", "must be positive and increasing");
      if (p["cutoff"]) m.cutoff = real(p["cutoff"], "monitors.phi.cutoff");
      if (p["center"]) {
        m.center = ints(p["center"], "monitors.phi.center");
        check(m.center.size() == 4, p["center"], "monitors.phi.center", "expected 4 coordinates");
      }
      if (p["t0"]) m.t0 = real(p["t0"], "monitors.phi.t0");
      check(!m.enabled || !m.radii.empty(), p, "monitors.phi.radii", "required when enabled");
    }
    if (const YAML::Node e = n["epsilon"]) {
      require_map(e, "monitors.epsilon", {"enabled", "R", "epsilon0"});
      EpsilonMonitorConfig& m = c.monitors.epsilon;
      if (e["enabled"]) m.enabled = flag(e["enabled"], "monitors.epsilon.enabled");
      if (e["R"]) m.R = real(e["R"], "monitors.epsilon.R");
      if (e["epsilon0"]) m.epsilon0 = real(e["epsilon0"], "monitors.epsilon.epsilon0");
      check(m.R > 0.0, e, "monitors.epsilon.R", "must be > 0");
    }
    if (n["snapshots_every"]) {
      c.monitors.snapshots_every = static_cast<int>(integer(n["snapshots_every"], "monitors.snapshots_every"));
      check(c.monitors.snapshots_every >= 0, n["snapshots_every"], "monitors.snapshots_every",
            "must be >= 0");
    }
  }

  if (const YAML::Node n = root["output"]) {
    require_map(n, "output", {"trace_path", "snapshot_dir"});
    if (n["trace_path"]) c.output.trace_path = text(n["trace_path"], "output.trace_path");
    if (n["snapshot_dir"]) c.output.snapshot_dir = text(n["snapshot_dir"], "output.snapshot_dir");
  }

  if (const YAML::Node n = root["continuation"]) {
    require_map(n, "continuation", {"alphas", "tolerance", "dt", "dt_max", "max_iterations"});
    ContinuationConfig& k = c.continuation;
    if (n["alphas"]) k.alphas = reals(n["alphas"], "continuation.alphas");
    for (std::size_t i = 0; i < k.alphas.size(); ++i)
      check(k.alphas[i] > 1.0 && (i == 0 || k.alphas[i] < k.alphas[i - 1]), n["alphas"],
            "continuation.alphas", "must be > 1 and strictly decreasing");
    if (n["tolerance"]) k.tolerance = real(n["tolerance"], "continuation.tolerance");
    if (n["dt"]) k.dt = real(n["dt"], "continuation.dt");
    if (n["dt_max"]) k.dt_max = real(n["dt_max"], "continuation.dt_max");
    if (n["max_iterations"]) k.max_iterations = integer(n["max_iterations"], "continuation.max_iterations");
    check(k.tolerance > 0.0 && k.dt > 0.0 && k.dt_max >= k.dt && k.max_iterations > 0, n,
          "continuation", "tolerance, dt, max_iterations must be > 0 and dt_max >= dt");
  }

  if (const YAML::Node n = root["deturck"]) {
    require_map(n, "deturck", {"data", "sites", "extent", "alpha", "amplitude", "dt", "t_end",
                               "ratio_min", "ratio_max"});
    DeturckConfig& d = c.deturck;
    if (n["data"]) d.data = text(n["data"], "deturck.data");
    check(d.data == "zero" || d.data == "abelian" || d.data == "nonabelian", n, "deturck.data",
          "must be zero, abelian or nonabelian");
    if (n["sites"]) d.sites = static_cast<int>(integer(n["sites"], "deturck.sites"));
    check(d.sites >= 4, n, "deturck.sites", "must be >= 4");
    if (n["extent"]) d.extent = real(n["extent"], "deturck.extent");
    if (n["alpha"]) d.alpha = real(n["alpha"], "deturck.alpha");
    if (n["amplitude"]) d.amplitude = real(n["amplitude"], "deturck.amplitude");
    if (n["dt"]) d.dt = real(n["dt"], "deturck.dt");
    if (n["t_end"]) d.t_end = real(n["t_end"], "deturck.t_end");
    if (n["ratio_min"]) d.ratio_min = real(n["ratio_min"], "deturck.ratio_min");
    if (n["ratio_max"]) d.ratio_max = real(n["ratio_max"], "deturck.ratio_max");
    check(d.extent > 0.0 && d.alpha >= 1.0 && d.dt > 0.0 && d.t_end >= 0.0, n, "deturck",
          "extent and dt must be > 0, alpha >= 1, t_end >= 0");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

GaugeField initial_field(const RunConfig& c) {
  const Lattice lat(c.dims, c.spacing);
  const InitialConfig& in = c.initial;
  if (in.kind == "cold") return cold_start(lat);
  if (in.kind == "hot") return hot_start(lat, c.seed, in.magnitude);
  if (in.kind == "file") {
    Snapshot s = read_snapshot(in.path);
    if (!(s.field.lattice() == lat)) throw ConfigError("initial.path: lattice differs from lattice section");
    return std::move(s.field);
  }
  GaugeField U = cold_start(lat);
  for (const InstantonConfig& ic : in.instantons) {
    InstantonSpec sp;
    if (ic.center.empty()) {
      for (int mu = 0; mu < kDim; ++mu) sp.center[mu] = lat.extent(mu) / 2.0 + 0.5 * lat.spacing();
    } else {
      for (int mu = 0; mu < kDim; ++mu) sp.center[mu] = ic.center[mu];
    }
    sp.scale = ic.scale;
    sp.charge = ic.charge;
    sp.taper_inner = ic.taper_inner;
    sp.taper_outer = ic.taper_outer;
    U = superpose(U, instanton(lat, sp));
  }
  return U;
}

}  // namespace ymflow::io
