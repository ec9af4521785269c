#pragma once
// Data-parallel inner loops of the flow, with a portable scalar variant and
// an AVX2 variant selected at runtime.
//
// Both variants are instantiated from one lane-generic template and perform
// the same IEEE operations in the same order per site, so their results are
// bit-identical; tests/test_kernels.cpp holds them to that and to the
// reference single-link routines in action.hpp / flow.hpp.

#include <string_view>

#include "ymflow/lattice.hpp"

namespace ymflow::kernels {

/// kappa in rho = (kappa / a^4) * sum_{mu<nu} (2 - tr P_{mu nu}); chosen so
/// that rho -> sum_{mu<nu} |F_{mu nu}|^2 for smooth fields.
inline constexpr double kKappa = 4.0;

struct KernelSet {
  const char* name;
  /// rho[s] = (kappa/a^4) sum_{mu<nu} |U_mu(s)U_nu(s+mu) - U_nu(s)U_mu(s+nu)|^2,
  /// which equals (kappa/a^4) sum (2 - 2 Re P_{mu nu}(s)) for unit links.
  void (*action_density)(const GaugeField& U, double* rho);
  /// Left-trivialised gradient, z[(mu*3 + k) * V + s]:
  /// Z_mu(s) = (kappa/a^4) vec(U_mu(s) sum_{nu != mu} [w(s) S_up + w(s - nu) S_down]).
  void (*force)(const GaugeField& U, const double* weight, double* z);
  /// U_mu(s) <- normalize(exp(scale * Z_mu(s)) U_mu(s)).
  void (*exp_update)(GaugeField& U, const double* z, double scale);
};

const KernelSet& scalar_kernels();

/// nullptr when not compiled in or the CPU lacks AVX2.
const KernelSet* avx2_kernels();

/// The kernel set used by the flow: AVX2 when available unless
/// YMFLOW_KERNELS=scalar or select_kernels("scalar") says otherwise.
const KernelSet& active_kernels();

/// "auto", "scalar" or "avx2"; throws ymflow::Error for an unavailable set.
void select_kernels(std::string_view name);

}  // namespace ymflow::kernels
