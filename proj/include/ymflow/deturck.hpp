#pragma once
// Noncompact finite-difference alpha-flow on the trivial bundle over T^4,
// with reference connection d, so a connection is d + a.
//
// Derivatives are central differences delta_mu. Conventions:
//   F_{mu nu}  = delta_mu a_nu - delta_nu a_mu + [a_mu, a_nu]
//   D_mu B     = delta_mu B + [a_mu, B]
//   D*a        = -sum_mu delta_mu a_mu           (phi below)
//   (-D*F)_nu  = sum_mu D_mu F_{mu nu}
//   direct     = -D*F + (alpha - 1) sum_mu (delta_mu |F|^2) F_{mu nu} / (1 + |F|^2)
//   modified   = direct - (delta_nu phi + [a_nu, phi])
//   gauge ODE  dS/dt = -S phi
// A gauge transformation S acts by a -> S a S^-1 - (delta S) S^-1, the
// discrete form of D = S o (d + a) o S^-1. With these choices the modified
// flow transformed by S reproduces the direct flow up to O(a^2 + dt^3).

#include "ymflow/action.hpp"
#include "ymflow/lattice.hpp"

namespace ymflow {

struct NoncompactState {
  ConnectionField a;
  double t = 0.0;
};

struct GaugePath {
  GaugeTransform S;
  double t = 0.0;
};

struct PairResult {
  NoncompactState direct;
  NoncompactState modified;
  GaugePath gauge;
};

/// Central-difference curvature, stored like the clover field [site * 6 + plane].
CurvatureField fd_curvature(const ConnectionField& a);

/// |F|^2 per site (sum over mu < nu).
DensityField fd_density(const CurvatureField& F);

/// -D*F plus the alpha correction term.
ConnectionField direct_alpha_rhs(const ConnectionField& a, double alpha);

/// phi = D*a = -sum_mu delta_mu a_mu, one algebra element per site.
std::vector<AlgebraElem> gauge_generator(const ConnectionField& a);

/// direct_alpha_rhs - D(D*a).
ConnectionField modified_rhs(const ConnectionField& a, double alpha);

/// S a S^-1 - (delta S) S^-1.
ConnectionField gauge_act(const ConnectionField& a, const GaugeTransform& S);

/// Integrates the direct flow, the modified flow and the gauge ODE together with
/// the three-stage scheme of step_rk3. Requires dt <= a^2/16. Throws NonFinite.
PairResult evolve_pair(const ConnectionField& a0, double alpha, double dt, double t_end);

/// max over sites and directions of |gauge_act(a_mod, S) - a_dir|.
double check_equivalence(const NoncompactState& direct, const NoncompactState& modified,
                         const GaugePath& S);

/// Smooth nonabelian data built from the lowest Fourier modes of the box,
/// every direction and generator populated. Used for refinement studies.
ConnectionField smooth_connection(const Lattice& lat, double amplitude);

/// a_mu(x) = amplitude * sin(2 pi k x_0 / L_0) T_1 in direction mu: transverse
/// (divergence free) for mu != 0, longitudinal (pure gauge to first order) for mu = 0.
ConnectionField abelian_mode(const Lattice& lat, double amplitude, int k, int mu);

/// Decay rate of a transverse abelian mode: sin^2(2 pi k a / L) / a^2.
double abelian_decay_rate(const Lattice& lat, int k);

/// check_equivalence for abelian_mode(lat, amplitude, k, 0) at time t from the
/// one-mode solution: a_0 decays as exp(-lambda t) and S = exp(theta T_1) with
/// theta = amplitude cos(q x_0) (sin(q a)/a)(1 - exp(-lambda t))/lambda.
double abelian_equivalence_prediction(const Lattice& lat, double amplitude, int k, double t);

/// a^4 sum_x (1 + |F|^2)^alpha.
double noncompact_energy(const ConnectionField& a, double alpha);

}  // namespace ymflow
