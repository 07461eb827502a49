#include "nlwave/types.hpp"

#include <Eigen/Dense>

namespace nlwave {

Mat4 mat4_mul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 4; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

Mat4 mat4_inverse(const Mat4& m, double* det) {
  Eigen::Matrix4d em;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) em(i, j) = m[i][j];
  const double d = em.determinant();
  if (det) *det = d;
  if (!(std::abs(d) > 1e-14)) {
    throw std::runtime_error("mat4_inverse: singular matrix");
  }
  Eigen::Matrix4d inv = em.inverse();
  Mat4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = inv(i, j);
  return out;
}

std::array<double, 3> sym3_eigenvalues(const Mat3& m) {
  Eigen::Matrix3d em;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) em(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(em,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

}  // namespace nlwave
