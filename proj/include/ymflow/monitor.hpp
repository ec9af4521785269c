#pragma once
// Heat-kernel weighted monotonicity quantity, local concentration detector,
// gap check and the alpha -> 1 continuation driver.

#include <string>
#include <vector>

#include "ymflow/action.hpp"
#include "ymflow/flow.hpp"

namespace ymflow {

/// Snapshots of (1 + rho)^alpha, rho the clover density, at increasing times.
struct SnapshotSeries {
  SnapshotSeries(const Lattice& l, double a) : lattice(l), alpha(a) {}

  /// Appends (1 + clover density of U)^alpha. Throws unless t > last time.
  void push(double t, const GaugeField& U);
  /// Appends (1 + rho)^alpha for a given |F|^2 field.
  void push_density(double t, const DensityField& rho);

  Lattice lattice;
  double alpha;
  std::vector<double> times;
  std::vector<DensityField> densities;
};

struct PhiValue {
  double value = 0.0;
  /// false when the kernel is unresolved (R < a) or wraps the torus (4R^2 > (L/4)^2).
  bool good = true;
};

/// R^(4 alpha - 2) int_{t0-4R^2}^{t0-R^2} sum_x a^4 (1+rho)^alpha phi^2 G dt, with the
/// backward Gaussian G at (x0, t0) on minimal-image distances. The weight
/// phi^2 G is normalized to unit lattice mass on every time slice, so a flat
/// series gives exactly 3 R^(4 alpha). Throws WindowNotCovered.
PhiValue phi_alpha(const SnapshotSeries& s, std::size_t x0, double t0, double R, double cutoff);

struct MonotonicityReport {
  std::vector<double> radii;
  std::vector<double> phi;
  /// Smallest C >= 0 with phi(R1) <= C e^{C (R2-R1)} phi(R2) + C (R2^2 - R1^2) E0 for all pairs.
  double constant = 0.0;
  bool pass = false;
};

/// Calibrated on flat and smoothly decaying series (12^4 and 8^4, radii 1..3 a), where
/// C stays below 3e-3. E0 carries the vacuum volume, so C shrinks like 1/volume.
inline constexpr double kMonotonicityConstant = 5e-3;

MonotonicityReport check_monotonicity(const SnapshotSeries& s, std::size_t x0, double t0,
                                      const std::vector<double>& radii, double cutoff,
                                      double c_cal = kMonotonicityConstant);

struct Flag {
  std::size_t site = 0;
  double t = 0.0;
  double psi = 0.0;
};

struct ConcentrationReport {
  double alpha = 1.0;
  double R = 0.0;
  double epsilon0 = 0.0;
  std::vector<Flag> flagged;  // sorted by psi, descending
};

inline constexpr double kDefaultEpsilon0 = 0.1;

/// Psi(x0, t0; R) = R^(4 alpha - 6) int_{t0-R^2}^{t0} sum_{|x-x0|<R} a^4 [(1+rho)^alpha - 1] dt,
/// reported in units of the unit-instanton energy 16 pi^2.
std::vector<double> psi_field(const SnapshotSeries& s, double t0, double R);

/// Evaluates psi_field at every snapshot time t0 with a covered window and
/// flags (x0, t0) with psi > epsilon0. Throws WindowNotCovered if no time qualifies.
ConcentrationReport epsilon_detector(const SnapshotSeries& s, double R, double epsilon0);

/// R^(4 alpha - 6) * a^4 * #{|x| < R} * R^2: the raw flat-field value of the
/// undivided parabolic-cylinder integral, approximately (pi^2/2) R^(4 alpha).
double flat_baseline(const Lattice& lat, double alpha, double R);

/// JSON text {alpha, R, epsilon0, flagged:[{site:[i,j,k,l], t, psi}]}.
std::string report_json(const ConcentrationReport& r, const Lattice& lat);

struct GapResult {
  bool flat = false;
  double energy = 0.0;  // final ym_energy
  CriticalResult critical;
};

/// Runs find_critical, stopping early once S_alpha - vacuum < alpha * tol * a^4 * volume;
/// FLAT when the final ym_energy < tol * a^4 * volume.
GapResult gap_check(const GaugeField& U, double alpha, double tol, double force_tol = 1e-8,
                    const CriticalOptions& opt = {});

struct ContinuationEntry {
  double alpha = 1.0;
  GaugeField field;
  double action_minus_vacuum = 0.0;
  double ym = 0.0;
  double sup_f2 = 0.0;
  double charge = 0.0;
  double residual = 0.0;
  bool converged = false;
  DensityField density;  // plaquette density
};

struct ContinuationResult {
  std::vector<ContinuationEntry> entries;
  /// max-norm density differences between consecutive alphas
  std::vector<double> density_steps;
  /// "strong convergence" or "concentration"
  std::string verdict;
};

/// Warm-started find_critical along a strictly decreasing list of alphas > 1.
/// The verdict is "concentration" when sup|F|^2 grows at every step or the
/// charge of any entry drifts from that of U0 by more than 0.05, and "strong
/// convergence" otherwise.
ContinuationResult alpha_continuation(const GaugeField& U0, const std::vector<double>& alphas,
                                      double tol, const CriticalOptions& opt = {});

}  // namespace ymflow
