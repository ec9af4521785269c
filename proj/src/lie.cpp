#include "ymflow/lie.hpp"

#include <numbers>

namespace ymflow {

GroupElem exp_map(const AlgebraElem& x) {
  const double n = norm(x);
  // sin(n/2)/n, series below 1e-6 where the closed form loses digits
  double f;
  if (n < 1e-6) {
    f = 0.5 * (1.0 - n * n / 24.0);
  } else {
    f = std::sin(0.5 * n) / n;
  }
  return {std::cos(0.5 * n), f * x.c1, f * x.c2, f * x.c3};
}

AlgebraElem log_map(const GroupElem& g) {
  const double s = std::sqrt(g.q1 * g.q1 + g.q2 * g.q2 + g.q3 * g.q3);
  if (s == 0.0) {
    if (g.q0 >= 0.0) return {};
    return {2.0 * std::numbers::pi, 0.0, 0.0};
  }
  const double f = 2.0 * std::atan2(s, g.q0) / s;
  return {f * g.q1, f * g.q2, f * g.q3};
}

AlgebraElem adjoint(const GroupElem& g, const AlgebraElem& x) {
  const GroupElem p{0.0, 0.5 * x.c1, 0.5 * x.c2, 0.5 * x.c3};
  const GroupElem r = mul_raw(mul_raw(g, p), inverse(g));
  const double s = 2.0 / norm2(g);
  return {s * r.q1, s * r.q2, s * r.q3};
}

Mat2 to_matrix(const GroupElem& g) {
  using C = std::complex<double>;
  // q0 I - i (q1 s1 + q2 s2 + q3 s3)
  return {C(g.q0, -g.q3), C(-g.q2, -g.q1), C(g.q2, -g.q1), C(g.q0, g.q3)};
}

Mat2 to_matrix(const AlgebraElem& x) {
  using C = std::complex<double>;
  // sum_k c_k (-i/2) s_k
  return {C(0.0, -0.5 * x.c3), C(-0.5 * x.c2, -0.5 * x.c1), C(0.5 * x.c2, -0.5 * x.c1),
          C(0.0, 0.5 * x.c3)};
}

Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

AlgebraElem project_algebra(const Mat2& m) {
  // X = (m - m^dag)/2 - tr(.)/2 I;  c_k = <T_k, X> = -2 tr(T_k X)
  Mat2 x{0.5 * (m[0] - std::conj(m[0])), 0.5 * (m[1] - std::conj(m[2])),
         0.5 * (m[2] - std::conj(m[1])), 0.5 * (m[3] - std::conj(m[3]))};
  const std::complex<double> half_tr = 0.5 * (x[0] + x[3]);
  x[0] -= half_tr;
  x[3] -= half_tr;
  // tr(T_1 X) = (-i/2)(x10 + x01), tr(T_2 X) = (x01 - x10)/2,
  // tr(T_3 X) = (-i/2)(x00 - x11)
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> t1 = -0.5 * i * (x[2] + x[1]);
  const std::complex<double> t2 = 0.5 * (x[1] - x[2]);
  const std::complex<double> t3 = -0.5 * i * (x[0] - x[3]);
  return {-2.0 * t1.real(), -2.0 * t2.real(), -2.0 * t3.real()};
}

GroupElem random_group(Rng& rng) {
  std::normal_distribution<double> gauss;
  GroupElem g;
  double n2 = 0.0;
  do {
    g = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    n2 = norm2(g);
  } while (n2 < 1e-12);
  return normalized(g);
}

AlgebraElem random_algebra_ball(Rng& rng, double radius) {
  if (radius <= 0.0) return {};
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  AlgebraElem d;
  double n = 0.0;
  do {
    d = {gauss(rng), gauss(rng), gauss(rng)};
    n = norm(d);
  } while (n < 1e-12);
  const double r = radius * std::cbrt(uni(rng));
  return (r / n) * d;
}

}  // namespace ymflow
