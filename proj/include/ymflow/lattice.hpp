#pragma once
// Periodic 4-torus, link-variable gauge fields and initial conditions.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ymflow/lie.hpp"

namespace ymflow {

inline constexpr int kDim = 4;

using Coords = std::array<int, kDim>;
using Position = std::array<double, kDim>;

/// Flat periodic 4-torus with lexicographic site order (x0 fastest).
class Lattice {
 public:
  explicit Lattice(Coords dims, double spacing = 1.0);

  const Coords& dims() const { return dims_; }
  int dim(int mu) const { return dims_[mu]; }
  double spacing() const { return spacing_; }
  std::size_t volume() const { return volume_; }
  /// Physical side length dims[mu] * spacing.
  double extent(int mu) const { return dims_[mu] * spacing_; }

  std::size_t site(const Coords& c) const;
  Coords coords(std::size_t site) const;
  Position position(std::size_t site) const;

  std::size_t up(std::size_t site, int mu) const { return geo_->up[mu][site]; }
  std::size_t down(std::size_t site, int mu) const { return geo_->down[mu][site]; }
  const std::int32_t* up_table(int mu) const { return geo_->up[mu].data(); }
  const std::int32_t* down_table(int mu) const { return geo_->down[mu].data(); }

  /// Minimal-image displacement from `from` to `to`, each component in [-L/2, L/2).
  Position displacement(const Position& from, const Position& to) const;
  double distance2(std::size_t a, std::size_t b) const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.dims_ == b.dims_ && a.spacing_ == b.spacing_;
  }

 private:
  struct Geometry {
    std::array<std::vector<std::int32_t>, kDim> up;
    std::array<std::vector<std::int32_t>, kDim> down;
  };
  Coords dims_;
  double spacing_;
  std::size_t volume_;
  std::shared_ptr<const Geometry> geo_;
};

void require_same(const Lattice& a, const Lattice& b);

/// Link variables U_mu(x), transporting from x+mu to x (U ~ exp(a A_mu)).
///
/// Storage is component-major: one contiguous array per (mu, quaternion
/// component), which is what the vector kernels load from.
class GaugeField {
 public:
  explicit GaugeField(const Lattice& lat);

  const Lattice& lattice() const { return lat_; }

  GroupElem link(std::size_t site, int mu) const {
    const std::size_t v = lat_.volume();
    const double* p = data_.data() + static_cast<std::size_t>(mu) * 4 * v + site;
    return {p[0], p[v], p[2 * v], p[3 * v]};
  }
  void set_link(std::size_t site, int mu, const GroupElem& g) {
    const std::size_t v = lat_.volume();
    double* p = data_.data() + static_cast<std::size_t>(mu) * 4 * v + site;
    p[0] = g.q0;
    p[v] = g.q1;
    p[2 * v] = g.q2;
    p[3 * v] = g.q3;
  }

  /// Pointer to component `comp` (0..3) of all links in direction mu.
  double* component(int mu, int comp) {
    return data_.data() + (static_cast<std::size_t>(mu) * 4 + comp) * lat_.volume();
  }
  const double* component(int mu, int comp) const {
    return data_.data() + (static_cast<std::size_t>(mu) * 4 + comp) * lat_.volume();
  }

  bool all_finite() const;

  friend bool operator==(const GaugeField& a, const GaugeField& b) {
    return a.lat_ == b.lat_ && a.data_ == b.data_;
  }

 private:
  Lattice lat_;
  std::vector<double> data_;
};

/// Site-wise group elements g(x).
struct GaugeTransform {
  explicit GaugeTransform(const Lattice& l) : lattice(l), g(l.volume(), GroupElem::identity()) {}
  Lattice lattice;
  std::vector<GroupElem> g;
};

/// Noncompact algebra-valued connection a_mu(x), stored [site * 4 + mu].
struct ConnectionField {
  explicit ConnectionField(const Lattice& l) : lattice(l), a(l.volume() * kDim) {}
  AlgebraElem& at(std::size_t site, int mu) { return a[site * kDim + mu]; }
  const AlgebraElem& at(std::size_t site, int mu) const { return a[site * kDim + mu]; }
  Lattice lattice;
  std::vector<AlgebraElem> a;
};

GaugeField cold_start(const Lattice& lat);

/// Links exp(xi) with xi uniform in the algebra ball of radius `magnitude`.
GaugeField hot_start(const Lattice& lat, std::uint64_t seed, double magnitude);

using ContinuumConnection = std::function<AlgebraElem(const Position&, int mu)>;

/// U_mu(x) = exp(a * A_mu(x + a mu/2)).
GaugeField sample_continuum(const Lattice& lat, const ContinuumConnection& A);

/// Noncompact field a_mu(x) = A_mu(x) at sites.
ConnectionField sample_connection(const Lattice& lat, const ContinuumConnection& A);

/// U'_mu(x) = g(x) U_mu(x) g(x+mu)^-1.
GaugeField apply_gauge(const GaugeField& U, const GaugeTransform& g);

GaugeTransform random_gauge(const Lattice& lat, std::uint64_t seed);
GaugeTransform inverse(const GaugeTransform& g);

/// Single (anti-)instanton of the 't Hooft form in one periodic cell.
///
/// The field is the singular-gauge instanton, built on the lattice as the
/// exact gauge transform of the midpoint-sampled regular-gauge field, and
/// rolled off to the trivial connection between `taper_inner` and
/// `taper_outer` (distances from the center). The pure-gauge singularity at
/// the center then carries the winding, so the continuum charge is exactly
/// `charge` (+1 or -1) for any taper.
struct InstantonSpec {
  Position center{};
  double scale = 1.0;
  int charge = 1;
  double taper_inner = -1.0;  // <0: a quarter of taper_outer
  double taper_outer = -1.0;  // <0: half the shortest extent
};
GaugeField instanton(const Lattice& lat, const InstantonSpec& spec);

/// Link-wise product U V; exact superposition when the supports are disjoint.
GaugeField superpose(const GaugeField& U, const GaugeField& V);

/// Mirror image x_axis -> -x_axis (reverses orientation).
GaugeField reflect(const GaugeField& U, int axis);

/// Translation by `steps` sites along mu.
GaugeField shift(const GaugeField& U, int mu, int steps);

}  // namespace ymflow
