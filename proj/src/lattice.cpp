#include "ymflow/lattice.hpp"

#include <cmath>
#include <numbers>

#include "ymflow/error.hpp"

namespace ymflow {

Lattice::Lattice(Coords dims, double spacing) : dims_(dims), spacing_(spacing), volume_(1) {
  for (int d : dims_) {
    if (d < 4) throw Error("lattice dimension must be >= 4");
    volume_ *= static_cast<std::size_t>(d);
  }
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) throw Error("lattice spacing must be > 0");
  if (volume_ > static_cast<std::size_t>(INT32_MAX)) throw Error("lattice too large");

  auto geo = std::make_shared<Geometry>();
  for (int mu = 0; mu < kDim; ++mu) {
    geo->up[mu].resize(volume_);
    geo->down[mu].resize(volume_);
  }
  for (std::size_t s = 0; s < volume_; ++s) {
    const Coords c = coords(s);
    for (int mu = 0; mu < kDim; ++mu) {
      Coords u = c, d = c;
      u[mu] = (c[mu] + 1) % dims_[mu];
      d[mu] = (c[mu] + dims_[mu] - 1) % dims_[mu];
      geo->up[mu][s] = static_cast<std::int32_t>(site(u));
      geo->down[mu][s] = static_cast<std::int32_t>(site(d));
    }
  }
  geo_ = std::move(geo);
}

std::size_t Lattice::site(const Coords& c) const {
  std::size_t s = 0;
  for (int mu = kDim - 1; mu >= 0; --mu) {
    const int x = ((c[mu] % dims_[mu]) + dims_[mu]) % dims_[mu];
    s = s * static_cast<std::size_t>(dims_[mu]) + static_cast<std::size_t>(x);
  }
  return s;
}

Coords Lattice::coords(std::size_t s) const {
  Coords c{};
  for (int mu = 0; mu < kDim; ++mu) {
    c[mu] = static_cast<int>(s % static_cast<std::size_t>(dims_[mu]));
    s /= static_cast<std::size_t>(dims_[mu]);
  }
  return c;
}

Position Lattice::position(std::size_t s) const {
  const Coords c = coords(s);
  return {c[0] * spacing_, c[1] * spacing_, c[2] * spacing_, c[3] * spacing_};
}

Position Lattice::displacement(const Position& from, const Position& to) const {
  Position d{};
  for (int mu = 0; mu < kDim; ++mu) {
    const double L = extent(mu);
    double x = to[mu] - from[mu];
    x -= L * std::floor(x / L + 0.5);
    d[mu] = x;
  }
  return d;
}

double Lattice::distance2(std::size_t a, std::size_t b) const {
  const Coords ca = coords(a), cb = coords(b);
  double r2 = 0.0;
  for (int mu = 0; mu < kDim; ++mu) {
    int d = std::abs(ca[mu] - cb[mu]);
    d = std::min(d, dims_[mu] - d);
    r2 += static_cast<double>(d) * d;
  }
  return r2 * spacing_ * spacing_;
}

void require_same(const Lattice& a, const Lattice& b) {
  if (!(a == b)) throw LatticeMismatch();
}

GaugeField::GaugeField(const Lattice& lat) : lat_(lat), data_(lat.volume() * 16, 0.0) {
  for (int mu = 0; mu < kDim; ++mu) {
    double* q0 = component(mu, 0);
    for (std::size_t s = 0; s < lat_.volume(); ++s) q0[s] = 1.0;
  }
}

bool GaugeField::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

GaugeField cold_start(const Lattice& lat) { return GaugeField(lat); }

GaugeField hot_start(const Lattice& lat, std::uint64_t seed, double magnitude) {
  GaugeField U(lat);
  if (magnitude <= 0.0) return U;
  Rng rng(seed);
  for (std::size_t s = 0; s < lat.volume(); ++s)
    for (int mu = 0; mu < kDim; ++mu) U.set_link(s, mu, exp_map(random_algebra_ball(rng, magnitude)));
  return U;
}

GaugeField sample_continuum(const Lattice& lat, const ContinuumConnection& A) {
  GaugeField U(lat);
  const double a = lat.spacing();
  for (std::size_t s = 0; s < lat.volume(); ++s) {
    const Position p = lat.position(s);
    for (int mu = 0; mu < kDim; ++mu) {
      Position mid = p;
      mid[mu] += 0.5 * a;
      U.set_link(s, mu, exp_map(a * A(mid, mu)));
    }
  }
  return U;
}

ConnectionField sample_connection(const Lattice& lat, const ContinuumConnection& A) {
  ConnectionField f(lat);
  for (std::size_t s = 0; s < lat.volume(); ++s) {
    const Position p = lat.position(s);
    for (int mu = 0; mu < kDim; ++mu) f.at(s, mu) = A(p, mu);
  }
  return f;
}

GaugeField apply_gauge(const GaugeField& U, const GaugeTransform& g) {
  require_same(U.lattice(), g.lattice);
  const Lattice& lat = U.lattice();
  GaugeField out(lat);
  for (std::size_t s = 0; s < lat.volume(); ++s)
    for (int mu = 0; mu < kDim; ++mu)
      out.set_link(s, mu,
                   group_mul(group_mul(g.g[s], U.link(s, mu)), inverse(g.g[lat.up(s, mu)])));
  return out;
}

GaugeTransform random_gauge(const Lattice& lat, std::uint64_t seed) {
  GaugeTransform g(lat);
  Rng rng(seed);
  for (auto& x : g.g) x = random_group(rng);
  return g;
}

GaugeTransform inverse(const GaugeTransform& g) {
  GaugeTransform out(g.lattice);
  for (std::size_t s = 0; s < g.g.size(); ++s) out.g[s] = inverse(g.g[s]);
  return out;
}

namespace {

// Hamilton quaternion from a 4-vector, e_0 = 1, e_k = i, j, k.
GroupElem quat(const Position& y) { return {y[0], y[1], y[2], y[3]}; }
GroupElem conj(const GroupElem& q) { return inverse(q); }

// Regular-gauge BPST potential A_mu = Im(ybar e_mu) / (|y|^2 + rho^2) for the
// instanton, Im(y ebar_mu) / (...) for the anti-instanton.
AlgebraElem regular_potential(const Position& y, int mu, double rho, int charge) {
  GroupElem e{0.0, 0.0, 0.0, 0.0};
  (mu == 0 ? e.q0 : mu == 1 ? e.q1 : mu == 2 ? e.q2 : e.q3) = 1.0;
  const GroupElem q = quat(y);
  const GroupElem p = charge > 0 ? mul_raw(conj(q), e) : mul_raw(q, conj(e));
  const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
  const double f = 2.0 / (r2 + rho * rho);  // AlgebraElem = 2 * vector part
  return {f * p.q1, f * p.q2, f * p.q3};
}

// Gauge function taking the regular gauge to the singular gauge.
GroupElem singular_gauge(const Position& y, int charge) {
  const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
  if (r < 1e-12) return GroupElem::identity();
  const GroupElem q{y[0] / r, y[1] / r, y[2] / r, y[3] / r};
  return charge > 0 ? q : conj(q);
}

double taper(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (r - inner) / (outer - inner)));
}

}  // namespace

GaugeField instanton(const Lattice& lat, const InstantonSpec& spec) {
  if (spec.charge != 1 && spec.charge != -1) throw Error("instanton charge must be +1 or -1");
  if (!(spec.scale > 0.0)) throw Error("instanton scale must be > 0");
  double outer = spec.taper_outer;
  if (outer < 0.0) {
    outer = lat.extent(0);
    for (int mu = 1; mu < kDim; ++mu) outer = std::min(outer, lat.extent(mu));
    outer *= 0.5;
  }
  const double inner = spec.taper_inner < 0.0 ? 0.25 * outer : spec.taper_inner;
  const double a = lat.spacing();

  GaugeField U(lat);
  for (std::size_t s = 0; s < lat.volume(); ++s) {
    const Position y = lat.displacement(spec.center, lat.position(s));
    const GroupElem h = singular_gauge(y, spec.charge);
    for (int mu = 0; mu < kDim; ++mu) {
      Position mid = y, next = y;
      mid[mu] += 0.5 * a;
      next[mu] += a;
      const double r = std::sqrt(mid[0] * mid[0] + mid[1] * mid[1] + mid[2] * mid[2] + mid[3] * mid[3]);
      const double chi = taper(r, inner, outer);
      if (chi == 0.0) continue;
      const GroupElem reg = exp_map(a * regular_potential(mid, mu, spec.scale, spec.charge));
      const GroupElem link =
          group_mul(group_mul(h, reg), inverse(singular_gauge(next, spec.charge)));
      U.set_link(s, mu, chi == 1.0 ? link : exp_map(chi * log_map(link)));
    }
  }
  return U;
}

GaugeField superpose(const GaugeField& U, const GaugeField& V) {
  require_same(U.lattice(), V.lattice());
  GaugeField out(U.lattice());
  for (std::size_t s = 0; s < U.lattice().volume(); ++s)
    for (int mu = 0; mu < kDim; ++mu) out.set_link(s, mu, group_mul(U.link(s, mu), V.link(s, mu)));
  return out;
}

GaugeField reflect(const GaugeField& U, int axis) {
  const Lattice& lat = U.lattice();
  GaugeField out(lat);
  for (std::size_t s = 0; s < lat.volume(); ++s) {
    Coords c = lat.coords(s);
    c[axis] = -c[axis];
    const std::size_t r = lat.site(c);
    for (int mu = 0; mu < kDim; ++mu) {
      if (mu == axis)
        out.set_link(s, mu, inverse(U.link(lat.down(r, mu), mu)));
      else
        out.set_link(s, mu, U.link(r, mu));
    }
  }
  return out;
}

GaugeField shift(const GaugeField& U, int mu, int steps) {
  const Lattice& lat = U.lattice();
  GaugeField out(lat);
  for (std::size_t s = 0; s < lat.volume(); ++s) {
    Coords c = lat.coords(s);
    c[mu] -= steps;
    const std::size_t src = lat.site(c);
    for (int nu = 0; nu < kDim; ++nu) out.set_link(s, nu, U.link(src, nu));
  }
  return out;
}

}  // namespace ymflow
