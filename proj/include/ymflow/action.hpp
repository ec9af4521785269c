#pragma once
// The discrete alpha-functional and curvature observables.
//
// Norm convention: |F|^2 = sum_{mu<nu} |F_{mu nu}|^2 with the orthonormal
// T_k basis of lie.hpp. In this convention a unit instanton has
// YM = integral |F|^2 = 16 pi^2 (twice the physics normalisation 8 pi^2), and
// Q = 1/(32 pi^2) integral eps_{mu nu rho sigma} tr(F_{mu nu} F_{rho sigma}) with the
// matrix trace tr(XY) = -<X,Y>/2, which gives Q = +1 for the instanton.

#include <array>
#include <numbers>
#include <vector>

#include "ymflow/kernels.hpp"
#include "ymflow/lattice.hpp"

namespace ymflow {

using kernels::kKappa;

/// YM energy of a unit (anti-)instanton in this module's convention.
inline constexpr double kInstantonEnergy = 16.0 * std::numbers::pi * std::numbers::pi;

inline constexpr int kPlanes = 6;
/// (mu, nu) with mu < nu, in storage order.
inline constexpr std::array<std::array<int, 2>, kPlanes> kPlaneDirs{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Per-site scalar field, e.g. |F|^2 (units 1/length^4).
struct DensityField {
  explicit DensityField(const Lattice& l) : lattice(l), rho(l.volume(), 0.0) {}
  Lattice lattice;
  std::vector<double> rho;
};

/// F_{mu nu}(x) for mu < nu, stored [site * 6 + plane].
struct CurvatureField {
  explicit CurvatureField(const Lattice& l) : lattice(l), F(l.volume() * kPlanes) {}
  const AlgebraElem& at(std::size_t site, int plane) const { return F[site * kPlanes + plane]; }
  Lattice lattice;
  std::vector<AlgebraElem> F;
};

/// U_mu(x) U_nu(x+mu) U_mu(x+nu)^-1 U_nu(x)^-1. Throws for mu == nu.
GroupElem plaquette(const GaugeField& U, std::size_t site, int mu, int nu);

/// (kappa/a^4)(2 - tr P_{mu nu}(x)). Throws unless mu < nu.
double plaquette_density(const GaugeField& U, std::size_t site, int mu, int nu);

/// rho(x) = sum_{mu<nu} plaquette_density, anchored at x (vector kernels).
DensityField action_density(const GaugeField& U);

/// a^4 sum_x (1 + rho(x))^alpha. Throws for alpha < 1.
double alpha_action(const GaugeField& U, double alpha);
double alpha_action(const DensityField& rho, double alpha);

/// a^4 * volume: the action of a flat field for every alpha.
double vacuum_action(const Lattice& lat);

/// a^4 sum_x rho(x).
double ym_energy(const GaugeField& U);
double ym_energy(const DensityField& rho);

/// Four-leaf clover field strength, F = project(mean of leaves) / a^2.
CurvatureField clover_curvature(const GaugeField& U);

/// sum_{mu<nu} |F^clover_{mu nu}(x)|^2.
DensityField clover_density(const GaugeField& U);
DensityField clover_density(const CurvatureField& F);

/// max_x of the clover density.
double sup_curvature(const GaugeField& U);

/// Clover topological charge.
double topological_charge(const GaugeField& U);
double topological_charge(const CurvatureField& F);

struct Observables {
  double action = 0.0;   // S_alpha
  double vacuum = 0.0;   // a^4 * volume
  double ym = 0.0;       // integral |F|^2 (plaquette)
  double sup_f2 = 0.0;   // max clover |F|^2
  double charge = 0.0;   // clover Q
};

Observables measure(const GaugeField& U, double alpha);

}  // namespace ymflow
