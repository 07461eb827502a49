#ifndef NLWAVE_BUMP_HPP
#define NLWAVE_BUMP_HPP

#include <cmath>

namespace nlwave {

// Standard smooth bump B(s) = exp(1 - 1/(1-s^2)) for |s| < 1, else 0.
// B(0) = 1. Evaluated as exactly zero for s >= 1 - 1e-8: there B is far
// below double resolution and the clamp avoids overflow in the exponent.
inline constexpr double kBumpEdge = 1.0 - 1e-8;

inline double bump(double s) {
  s = std::abs(s);
  if (s >= kBumpEdge) return 0.0;
  const double q = 1.0 - s * s;
  return std::exp(1.0 - 1.0 / q);
}

// W(s) = B'(s)/s = -2 B(s) / (1-s^2)^2, smooth through s = 0.
// Gives d/dx_j B(|x|/L) = W(s) x_j / L^2 with s = |x|/L.
inline double bump_w(double s) {
  s = std::abs(s);
  if (s >= kBumpEdge) return 0.0;
  const double q = 1.0 - s * s;
  return -2.0 * std::exp(1.0 - 1.0 / q) / (q * q);
}

// V(s) = W'(s)/s = 4 B(s) (2 s^2 - 1) / (1-s^2)^4, smooth through s = 0.
// Gives d^2/dx_i dx_j B(|x|/L) = V(s) x_i x_j / L^4 + W(s) delta_ij / L^2.
inline double bump_v(double s) {
  s = std::abs(s);
  if (s >= kBumpEdge) return 0.0;
  const double q = 1.0 - s * s;
  const double q2 = q * q;
  return 4.0 * std::exp(1.0 - 1.0 / q) * (2.0 * s * s - 1.0) / (q2 * q2);
}

}  // namespace nlwave

#endif
