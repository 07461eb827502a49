#ifndef NLWAVE_TYPES_HPP
#define NLWAVE_TYPES_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace nlwave {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline double norm3(const Vec3& x) {
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

inline Mat4 mat4_zero() {
  Mat4 m{};
  return m;
}

// Minkowski metric, signature (-,+,+,+).
inline Mat4 minkowski() {
  Mat4 m{};
  m[0][0] = -1.0;
  m[1][1] = 1.0;
  m[2][2] = 1.0;
  m[3][3] = 1.0;
  return m;
}

inline Mat4 mat4_identity() {
  Mat4 m{};
  for (int a = 0; a < 4; ++a) m[a][a] = 1.0;
  return m;
}

inline double max_abs_entry(const Mat4& m) {
  double v = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v = std::max(v, std::abs(m[a][b]));
  return v;
}

Mat4 mat4_mul(const Mat4& a, const Mat4& b);

// Inverse and determinant of a general 4x4 matrix. Throws std::runtime_error
// when the matrix is numerically singular.
Mat4 mat4_inverse(const Mat4& m, double* det = nullptr);

// Eigenvalues of a symmetric 3x3 matrix, ascending.
std::array<double, 3> sym3_eigenvalues(const Mat3& m);

}  // namespace nlwave

#endif
