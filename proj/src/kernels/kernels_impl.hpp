#pragma once
// Lane-generic kernel bodies. `Lane` supplies the vector type and its
// load/gather/store; arithmetic uses the type's + - * / operators (GCC
// vector extensions for the SIMD lanes, plain double for the scalar lane).

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "ymflow/kernels.hpp"

namespace ymflow::kernels::detail {

/// cos(n/2) and sin(n/2)/n, with the same series switch as exp_map.
inline void exp_coeffs(double n, double& c, double& f) {
  if (n < 1e-6) {
    f = 0.5 * (1.0 - n * n / 24.0);
  } else {
    f = std::sin(0.5 * n) / n;
  }
  c = std::cos(0.5 * n);
}

template <class Lane>
struct Quat {
  using V = typename Lane::V;
  V w, x, y, z;
};

template <class Lane>
inline Quat<Lane> mul(const Quat<Lane>& a, const Quat<Lane>& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

template <class Lane>
inline Quat<Lane> inverse(const Quat<Lane>& q) {
  return {q.w, -q.x, -q.y, -q.z};
}

// a * conj(b)
template <class Lane>
inline Quat<Lane> mul_inv(const Quat<Lane>& a, const Quat<Lane>& b) {
  return {a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z,
          -a.w * b.x + a.x * b.w - a.y * b.z + a.z * b.y,
          -a.w * b.y + a.x * b.z + a.y * b.w - a.z * b.x,
          -a.w * b.z - a.x * b.y + a.y * b.x + a.z * b.w};
}

// conj(a) * b
template <class Lane>
inline Quat<Lane> inv_mul(const Quat<Lane>& a, const Quat<Lane>& b) {
  return {a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z,
          a.w * b.x - a.x * b.w - a.y * b.z + a.z * b.y,
          a.w * b.y + a.x * b.z - a.y * b.w - a.z * b.x,
          a.w * b.z - a.x * b.y + a.y * b.x - a.z * b.w};
}

template <class Lane>
inline Quat<Lane> load_link(const GaugeField& U, int mu, const std::int32_t* idx) {
  return {Lane::gather(U.component(mu, 0), idx), Lane::gather(U.component(mu, 1), idx),
          Lane::gather(U.component(mu, 2), idx), Lane::gather(U.component(mu, 3), idx)};
}

template <class Lane>
inline Quat<Lane> load_link(const GaugeField& U, int mu, std::size_t s) {
  return {Lane::load(U.component(mu, 0) + s), Lane::load(U.component(mu, 1) + s),
          Lane::load(U.component(mu, 2) + s), Lane::load(U.component(mu, 3) + s)};
}

template <class Lane>
void action_density_range(const GaugeField& U, double* rho, std::size_t begin, std::size_t end) {
  using V = typename Lane::V;
  constexpr int W = Lane::width;
  const Lattice& lat = U.lattice();
  const double a = lat.spacing();
  const V norm = Lane::set1(kKappa / (a * a * a * a));
  for (std::size_t s = begin; s + W <= end; s += W) {
    V acc = Lane::set1(0.0);
    for (int mu = 0; mu < kDim; ++mu) {
      const Quat<Lane> umu = load_link<Lane>(U, mu, s);
      const std::int32_t* xmu = lat.up_table(mu) + s;
      for (int nu = mu + 1; nu < kDim; ++nu) {
        const std::int32_t* xnu = lat.up_table(nu) + s;
        const Quat<Lane> l = mul(umu, load_link<Lane>(U, nu, xmu));
        const Quat<Lane> r = mul(load_link<Lane>(U, nu, s), load_link<Lane>(U, mu, xnu));
        const V d0 = l.w - r.w, d1 = l.x - r.x, d2 = l.y - r.y, d3 = l.z - r.z;
        acc = acc + (d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3);
      }
    }
    Lane::store(rho + s, norm * acc);
  }
}

template <class Lane>
void force_range(const GaugeField& U, const double* weight, double* z, std::size_t begin,
                 std::size_t end) {
  using V = typename Lane::V;
  constexpr int W = Lane::width;
  const Lattice& lat = U.lattice();
  const std::size_t vol = lat.volume();
  const double a = lat.spacing();
  const V norm = Lane::set1(kKappa / (a * a * a * a));
  std::int32_t diag[W];
  for (std::size_t s = begin; s + W <= end; s += W) {
    const V w_here = Lane::load(weight + s);
    for (int mu = 0; mu < kDim; ++mu) {
      const std::int32_t* xmu = lat.up_table(mu) + s;
      Quat<Lane> acc{Lane::set1(0.0), Lane::set1(0.0), Lane::set1(0.0), Lane::set1(0.0)};
      for (int nu = 0; nu < kDim; ++nu) {
        if (nu == mu) continue;
        const std::int32_t* xnu = lat.up_table(nu) + s;
        const std::int32_t* xmnu = lat.down_table(nu) + s;
        for (int l = 0; l < W; ++l) diag[l] = lat.up_table(mu)[xmnu[l]];

        // U_nu(x+mu) U_mu(x+nu)^-1 U_nu(x)^-1
        const Quat<Lane> up = mul_inv(
            mul_inv(load_link<Lane>(U, nu, xmu), load_link<Lane>(U, mu, xnu)),
            load_link<Lane>(U, nu, s));
        // U_nu(x+mu-nu)^-1 U_mu(x-nu)^-1 U_nu(x-nu)
        const Quat<Lane> dn = mul(
            inv_mul(load_link<Lane>(U, nu, diag), inverse(load_link<Lane>(U, mu, xmnu))),
            load_link<Lane>(U, nu, xmnu));
        const V w_dn = Lane::gather(weight, xmnu);
        acc.w = acc.w + (w_here * up.w + w_dn * dn.w);
        acc.x = acc.x + (w_here * up.x + w_dn * dn.x);
        acc.y = acc.y + (w_here * up.y + w_dn * dn.y);
        acc.z = acc.z + (w_here * up.z + w_dn * dn.z);
      }
      const Quat<Lane> g = mul(load_link<Lane>(U, mu, s), acc);
      Lane::store(z + (static_cast<std::size_t>(mu) * 3 + 0) * vol + s, norm * g.x);
      Lane::store(z + (static_cast<std::size_t>(mu) * 3 + 1) * vol + s, norm * g.y);
      Lane::store(z + (static_cast<std::size_t>(mu) * 3 + 2) * vol + s, norm * g.z);
    }
  }
}

template <class Lane>
void exp_update_range(GaugeField& U, const double* z, double scale, std::size_t begin,
                      std::size_t end) {
  using V = typename Lane::V;
  constexpr int W = Lane::width;
  const std::size_t vol = U.lattice().volume();
  const V sc = Lane::set1(scale);
  const V one = Lane::set1(1.0);
  alignas(32) double nbuf[W], cbuf[W], fbuf[W];
  for (int mu = 0; mu < kDim; ++mu) {
    double* c0 = U.component(mu, 0);
    double* c1 = U.component(mu, 1);
    double* c2 = U.component(mu, 2);
    double* c3 = U.component(mu, 3);
    const double* z1 = z + (static_cast<std::size_t>(mu) * 3 + 0) * vol;
    const double* z2 = z + (static_cast<std::size_t>(mu) * 3 + 1) * vol;
    const double* z3 = z + (static_cast<std::size_t>(mu) * 3 + 2) * vol;
    for (std::size_t s = begin; s + W <= end; s += W) {
      const V x1 = sc * Lane::load(z1 + s);
      const V x2 = sc * Lane::load(z2 + s);
      const V x3 = sc * Lane::load(z3 + s);
      Lane::store(nbuf, Lane::sqrt(x1 * x1 + x2 * x2 + x3 * x3));
      for (int l = 0; l < W; ++l) exp_coeffs(nbuf[l], cbuf[l], fbuf[l]);
      const V f = Lane::load(fbuf);
      const Quat<Lane> e{Lane::load(cbuf), f * x1, f * x2, f * x3};
      const Quat<Lane> u{Lane::load(c0 + s), Lane::load(c1 + s), Lane::load(c2 + s),
                         Lane::load(c3 + s)};
      const Quat<Lane> p = mul(e, u);
      const V inv = one / Lane::sqrt(p.w * p.w + p.x * p.x + p.y * p.y + p.z * p.z);
      Lane::store(c0 + s, p.w * inv);
      Lane::store(c1 + s, p.x * inv);
      Lane::store(c2 + s, p.y * inv);
      Lane::store(c3 + s, p.z * inv);
    }
  }
}

struct ScalarLane {
  using V = double;
  static constexpr int width = 1;
  static V load(const double* p) { return *p; }
  static V gather(const double* base, const std::int32_t* idx) { return base[idx[0]]; }
  static void store(double* p, V v) { *p = v; }
  static V set1(double x) { return x; }
  static V sqrt(V x) { return std::sqrt(x); }
};

}  // namespace ymflow::kernels::detail
