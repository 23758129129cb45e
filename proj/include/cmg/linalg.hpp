#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "cmg/errors.hpp"

namespace cmg {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  // row-major, m[i*3+j]

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 add(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec3 scale(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// Euclidean (chart) norm.
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Vec3 matvec(const Mat3& m, const Vec3& v) {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
          m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

inline Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * b[k * 3 + j];
      r[i * 3 + j] = s;
    }
  return r;
}

inline Mat3 transpose(const Mat3& m) {
  return {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
}

inline double det3(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

inline double frobenius(const Mat3& m) {
  double s = 0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

// Inverse by adjugate; throws when |det| falls below the guard.
inline Mat3 invert3(const Mat3& m, double guard = 1e-13) {
  double d = det3(m);
  if (std::abs(d) < guard) throw SingularMetricError("3x3 inverse: |det| below guard");
  double id = 1.0 / d;
  Mat3 r;
  r[0] = (m[4] * m[8] - m[5] * m[7]) * id;
  r[1] = (m[2] * m[7] - m[1] * m[8]) * id;
  r[2] = (m[1] * m[5] - m[2] * m[4]) * id;
  r[3] = (m[5] * m[6] - m[3] * m[8]) * id;
  r[4] = (m[0] * m[8] - m[2] * m[6]) * id;
  r[5] = (m[2] * m[3] - m[0] * m[5]) * id;
  r[6] = (m[3] * m[7] - m[4] * m[6]) * id;
  r[7] = (m[1] * m[6] - m[0] * m[7]) * id;
  r[8] = (m[0] * m[4] - m[1] * m[3]) * id;
  return r;
}

inline Vec3 solve3(const Mat3& m, const Vec3& rhs, double guard = 1e-13) {
  return matvec(invert3(m, guard), rhs);
}

// Eigenvalues of a symmetric 3x3 matrix, ascending, by the trigonometric
// closed form. Deterministic; no iteration.
inline std::array<double, 3> sym_eigenvalues(const Mat3& a) {
  double p1 = a[1] * a[1] + a[2] * a[2] + a[5] * a[5];
  if (p1 == 0.0) {
    std::array<double, 3> e{a[0], a[4], a[8]};
    std::sort(e.begin(), e.end());
    return e;
  }
  double q = (a[0] + a[4] + a[8]) / 3.0;
  double p2 = (a[0] - q) * (a[0] - q) + (a[4] - q) * (a[4] - q) + (a[8] - q) * (a[8] - q) +
              2.0 * p1;
  double p = std::sqrt(p2 / 6.0);
  Mat3 b;
  for (int i = 0; i < 9; ++i) b[i] = a[i] / p;
  b[0] -= q / p;
  b[4] -= q / p;
  b[8] -= q / p;
  double r = det3(b) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;
  double e1 = q + 2.0 * p * std::cos(phi);
  double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> e{e3, e2, e1};
  std::sort(e.begin(), e.end());
  return e;
}

// Frobenius condition estimate, used only as a trust guard.
inline double cond_frobenius(const Mat3& m, double guard = 1e-13) {
  return frobenius(m) * frobenius(invert3(m, guard));
}

}  // namespace cmg
