#include "nlwave/multiplier.hpp"

#include <cmath>

namespace nlwave {

double MultiplierProfile::f_at(double alpha, double r) {
  const double beta = 2.0 / alpha;
  return beta - beta * std::pow(1.0 + r, -alpha);
}

double MultiplierProfile::fprime_at(double alpha, double r) {
  const double beta = 2.0 / alpha;
  return alpha * beta * std::pow(1.0 + r, -alpha - 1.0);
}

double MultiplierProfile::chi_at(double alpha, double r) {
  const double beta = 2.0 / alpha;
  if (r < 1e-8) {
    // f/r ~ alpha*beta (1 - (alpha+1) r/2) near the removable singularity.
    return alpha * beta * (1.0 - 0.5 * (alpha + 1.0) * r);
  }
  return f_at(alpha, r) / r;
}

double MultiplierProfile::chiprime_at(double alpha, double r) {
  const double beta = 2.0 / alpha;
  if (r < 1e-6) {
    return -0.5 * alpha * beta * (alpha + 1.0) +
           alpha * beta * (alpha + 1.0) * (alpha + 2.0) * r / 3.0;
  }
  return (fprime_at(alpha, r) * r - f_at(alpha, r)) / (r * r);
}

MultiplierProfile MultiplierProfile::make(double alpha, double r_max,
                                          int samples) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("MultiplierProfile: need 0 < alpha < 1");
  if (samples < 2 || !(r_max > 0.0))
    throw std::invalid_argument("MultiplierProfile: bad sample grid");
  MultiplierProfile p;
  p.alpha = alpha;
  p.beta = 2.0 / alpha;
  p.r.resize(samples);
  p.f.resize(samples);
  p.chi.resize(samples);
  p.fprime.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const double r = r_max * i / (samples - 1);
    p.r[i] = r;
    p.f[i] = f_at(alpha, r);
    p.chi[i] = chi_at(alpha, r);
    p.fprime[i] = fprime_at(alpha, r);
  }
  return p;
}

}  // namespace nlwave
