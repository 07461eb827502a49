#ifndef NLWAVE_MULTIPLIER_HPP
#define NLWAVE_MULTIPLIER_HPP

#include <vector>

#include <stdexcept>

namespace nlwave {

// Radial multiplier profile f(r) = beta - beta (1+r)^(-alpha) with
// beta = 2/alpha, plus chi = f/r (chi(0) = alpha*beta = 2, removable) and
// f'(r) = alpha beta (1+r)^(-alpha-1). Satisfies f(0)=0, 0 <= f < beta,
// |chi| <= beta/(1+r), |chi'| <= beta/(1+r)^2, chi - f'/2 >= (1+r)^(-a-1).
struct MultiplierProfile {
  double alpha = 0.5;
  double beta = 4.0;
  std::vector<double> r;       // radial sample grid
  std::vector<double> f;
  std::vector<double> chi;
  std::vector<double> fprime;

  static MultiplierProfile make(double alpha, double r_max, int samples);

  static double f_at(double alpha, double r);
  static double chi_at(double alpha, double r);      // f/r, limit 2 at r=0
  static double fprime_at(double alpha, double r);
  static double chiprime_at(double alpha, double r); // limit -(a+1) at r=0
};

}  // namespace nlwave

#endif
