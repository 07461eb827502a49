#ifndef NLWAVE_SPHERE_HPP
#define NLWAVE_SPHERE_HPP

#include <vector>

#include "nlwave/types.hpp"

namespace nlwave {

// Product quadrature on the unit sphere: Gauss-Legendre in cos(theta),
// uniform trapezoid in azimuth. Weights sum to 4*pi. Integrates spherical
// harmonics Y_lm exactly for l <= 2*n_theta - 1, |m| < n_phi.
struct SphereSampling {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<Vec3> node;  // unit direction per quadrature node
  std::vector<double> w;   // quadrature weight per node

  int count() const { return static_cast<int>(node.size()); }

  static SphereSampling product_gauss(int n_theta = 16, int n_phi = 32);
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace nlwave

#endif
