#pragma once
// SU(2) and su(2) value kernels.
//
// Conventions (used everywhere in the project):
//   GroupElem (q0,q1,q2,q3) is the Hamilton quaternion q0 + q1 i + q2 j + q3 k,
//   realised as the 2x2 matrix q0*I - i*(q1 s1 + q2 s2 + q3 s3).
//   AlgebraElem (c1,c2,c3) is sum_k c_k T_k with T_k = -(i/2) s_k, i.e. the
//   pure quaternion (c1 i + c2 j + c3 k)/2.
//   <X,Y> = -2 tr(XY) = sum_k c_k(X) c_k(Y), so the T_k are orthonormal and
//   [T_1,T_2] = T_3 (the bracket is the cross product of coefficient vectors).

#include <array>
#include <cmath>
#include <complex>
#include <random>

namespace ymflow {

struct AlgebraElem {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  AlgebraElem& operator+=(const AlgebraElem& o) {
    c1 += o.c1;
    c2 += o.c2;
    c3 += o.c3;
    return *this;
  }
  AlgebraElem& operator-=(const AlgebraElem& o) {
    c1 -= o.c1;
    c2 -= o.c2;
    c3 -= o.c3;
    return *this;
  }
  AlgebraElem& operator*=(double s) {
    c1 *= s;
    c2 *= s;
    c3 *= s;
    return *this;
  }
  friend bool operator==(const AlgebraElem&, const AlgebraElem&) = default;
};

inline AlgebraElem operator+(AlgebraElem a, const AlgebraElem& b) { return a += b; }
inline AlgebraElem operator-(AlgebraElem a, const AlgebraElem& b) { return a -= b; }
inline AlgebraElem operator-(const AlgebraElem& a) { return {-a.c1, -a.c2, -a.c3}; }
inline AlgebraElem operator*(double s, AlgebraElem a) { return a *= s; }
inline AlgebraElem operator*(AlgebraElem a, double s) { return a *= s; }

inline double inner(const AlgebraElem& x, const AlgebraElem& y) {
  return x.c1 * y.c1 + x.c2 * y.c2 + x.c3 * y.c3;
}
inline double norm2(const AlgebraElem& x) { return inner(x, x); }
inline double norm(const AlgebraElem& x) { return std::sqrt(norm2(x)); }

/// Lie bracket [X,Y].
inline AlgebraElem bracket(const AlgebraElem& x, const AlgebraElem& y) {
  return {x.c2 * y.c3 - x.c3 * y.c2, x.c3 * y.c1 - x.c1 * y.c3, x.c1 * y.c2 - x.c2 * y.c1};
}

struct GroupElem {
  double q0 = 1.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  static constexpr GroupElem identity() { return {1.0, 0.0, 0.0, 0.0}; }
  friend bool operator==(const GroupElem&, const GroupElem&) = default;
};

inline double norm2(const GroupElem& g) {
  return g.q0 * g.q0 + g.q1 * g.q1 + g.q2 * g.q2 + g.q3 * g.q3;
}

inline GroupElem normalized(const GroupElem& g) {
  const double s = 1.0 / std::sqrt(norm2(g));
  return {g.q0 * s, g.q1 * s, g.q2 * s, g.q3 * s};
}

/// Raw quaternion product, no renormalisation.
inline GroupElem mul_raw(const GroupElem& a, const GroupElem& b) {
  return {a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
          a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
          a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
          a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0};
}

/// Group product a*b, renormalised to unit norm.
inline GroupElem group_mul(const GroupElem& a, const GroupElem& b) {
  return normalized(mul_raw(a, b));
}

inline GroupElem inverse(const GroupElem& g) { return {g.q0, -g.q1, -g.q2, -g.q3}; }

/// Real part of a*inverse(b); equals tr(a b^-1)/2.
inline double re_mul_inv(const GroupElem& a, const GroupElem& b) {
  return a.q0 * b.q0 + a.q1 * b.q1 + a.q2 * b.q2 + a.q3 * b.q3;
}

/// Closed-form exponential su(2) -> SU(2).
GroupElem exp_map(const AlgebraElem& x);

/// Principal logarithm, |result| <= 2*pi.
AlgebraElem log_map(const GroupElem& g);

/// Anti-Hermitian traceless part of a group element in the T_k basis.
/// For a quaternion this is exactly twice its vector part.
inline AlgebraElem project_algebra(const GroupElem& g) {
  return {2.0 * g.q1, 2.0 * g.q2, 2.0 * g.q3};
}

/// Adjoint action g X g^-1.
AlgebraElem adjoint(const GroupElem& g, const AlgebraElem& x);

// 2x2 complex matrices, row-major {m00, m01, m10, m11}.
using Mat2 = std::array<std::complex<double>, 4>;

Mat2 to_matrix(const GroupElem& g);
Mat2 to_matrix(const AlgebraElem& x);
Mat2 matmul(const Mat2& a, const Mat2& b);

/// Coefficients of (m - m^dag)/2 minus its trace part, in the T_k basis.
AlgebraElem project_algebra(const Mat2& m);

using Rng = std::mt19937_64;

/// Haar-distributed SU(2) element.
GroupElem random_group(Rng& rng);

/// Uniform sample from the algebra ball of the given radius.
AlgebraElem random_algebra_ball(Rng& rng, double radius);

}  // namespace ymflow
