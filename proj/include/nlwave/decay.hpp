#ifndef NLWAVE_DECAY_HPP
#define NLWAVE_DECAY_HPP

#include <string>
#include <vector>

namespace nlwave {

// tau_n = min(gamma^n, tau_max), n >= 1, deduplicated; consecutive leaves
// satisfy gamma^-2 tau_n <= tau_{n-1} <= gamma^2 tau_n. Requires gamma >= 1.2.
std::vector<double> dyadic_schedule(double gamma, double tau_max);

// Sorted union of the dyadic sequence and a uniform leaf list.
std::vector<double> merge_schedules(const std::vector<double>& a,
                                    const std::vector<double>& b);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms residual of log values about the fit
  int points = 0;
  bool degenerate = false;
};

// Least-squares slope of log(value) against log(1+tau), skipping
// non-positive values. Degenerate when fewer than 2 usable points.
FitResult fit_power_law(const std::vector<double>& tau,
                        const std::vector<double>& value);

struct DecaySeries {
  std::vector<double> tau;
  std::vector<double> E_total;
  std::vector<double> E_interior;
  std::vector<double> max_phi_inner;
  std::vector<double> max_phi_outer_weighted;
  std::vector<double> E_T;
  std::vector<double> E_Omega;
};

struct DecayReport {
  double alpha = 0.5;
  FitResult energy;
  FitResult pointwise;
  double target_energy_slope = 0.0;     // -(2 - alpha)
  double target_pointwise_slope = 0.0;  // -(1 - alpha/2)
  double slack = 0.3;
  bool pass_energy = false;
  bool pass_pointwise = false;
  bool enough_leaves = false;  // >= 6 leaves spanning a factor >= 4 in 1+tau
};

// Fit over leaves with tau in [tau_lo, tau_hi] (the full series when
// tau_hi <= tau_lo).
DecayReport fit_decay(const DecaySeries& s, double alpha, double tau_lo = 0.0,
                      double tau_hi = 0.0);

std::string decay_report_json(const DecayReport& r);

}  // namespace nlwave

#endif
