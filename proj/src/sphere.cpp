#include "nlwave/sphere.hpp"

#include <cmath>
#include <stdexcept>

namespace nlwave {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pi = std::acos(-1.0);
  // Newton iteration from the Chebyshev-angle initial guess; symmetry gives
  // the other half for free.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

SphereSampling SphereSampling::product_gauss(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1)
    throw std::invalid_argument("SphereSampling: counts must be positive");
  SphereSampling s;
  s.n_theta = n_theta;
  s.n_phi = n_phi;
  std::vector<double> mu, wmu;
  gauss_legendre(n_theta, mu, wmu);
  const double pi = std::acos(-1.0);
  const double dphi = 2.0 * pi / n_phi;
  s.node.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  s.w.reserve(s.node.capacity());
  for (int it = 0; it < n_theta; ++it) {
    const double ct = mu[it];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = dphi * ip;
      s.node.push_back({st * std::cos(phi), st * std::sin(phi), ct});
      s.w.push_back(wmu[it] * dphi);
    }
  }
  return s;
}

}  // namespace nlwave
