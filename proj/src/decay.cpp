#include "nlwave/decay.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nlwave {

std::vector<double> dyadic_schedule(double gamma, double tau_max) {
  if (!(gamma >= 1.2))
    throw std::invalid_argument("dyadic_schedule: gamma must be >= 1.2");
  if (!(tau_max > 0.0))
    throw std::invalid_argument("dyadic_schedule: tau_max must be positive");
  std::vector<double> out;
  for (int n = 1;; ++n) {
    const double tau = std::pow(gamma, n);
    if (tau >= tau_max) {
      if (out.empty() || out.back() < tau_max) out.push_back(tau_max);
      break;
    }
    out.push_back(tau);
  }
  return out;
}

std::vector<double> merge_schedules(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  std::vector<double> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) {
                          return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(x));
                        }),
            out.end());
  return out;
}

FitResult fit_power_law(const std::vector<double>& tau,
                        const std::vector<double>& value) {
  if (tau.size() != value.size())
    throw std::invalid_argument("fit_power_law: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (value[i] > 0.0 && std::isfinite(value[i])) {
      lx.push_back(std::log(1.0 + tau[i]));
      ly.push_back(std::log(value[i]));
    }
  }
  FitResult r;
  r.points = static_cast<int>(lx.size());
  if (r.points < 2) {
    r.degenerate = true;
    return r;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < r.points; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = r.points * sxx - sx * sx;
  if (std::abs(den) < 1e-14) {
    r.degenerate = true;
    return r;
  }
  r.slope = (r.points * sxy - sx * sy) / den;
  r.intercept = (sy - r.slope * sx) / r.points;
  double ss = 0.0;
  for (int i = 0; i < r.points; ++i) {
    const double e = ly[i] - (r.intercept + r.slope * lx[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / r.points);
  return r;
}

DecayReport fit_decay(const DecaySeries& s, double alpha, double tau_lo,
                      double tau_hi) {
  DecayReport rep;
  rep.alpha = alpha;
  rep.target_energy_slope = -(2.0 - alpha);
  rep.target_pointwise_slope = -(1.0 - 0.5 * alpha);

  std::vector<double> tau, et, mp;
  for (std::size_t i = 0; i < s.tau.size(); ++i) {
    if (tau_hi > tau_lo && (s.tau[i] < tau_lo - 1e-9 || s.tau[i] > tau_hi + 1e-9))
      continue;
    tau.push_back(s.tau[i]);
    et.push_back(s.E_total[i]);
    mp.push_back(s.max_phi_inner[i]);
  }
  rep.energy = fit_power_law(tau, et);
  rep.pointwise = fit_power_law(tau, mp);

  int usable = 0;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (et[i] > 0.0) {
      if (usable == 0) lo = hi = 1.0 + tau[i];
      lo = std::min(lo, 1.0 + tau[i]);
      hi = std::max(hi, 1.0 + tau[i]);
      ++usable;
    }
  }
  rep.enough_leaves = usable >= 6 && hi >= 4.0 * lo;
  rep.pass_energy = !rep.energy.degenerate && rep.enough_leaves &&
                    rep.energy.slope <= rep.target_energy_slope + rep.slack;
  rep.pass_pointwise =
      !rep.pointwise.degenerate && rep.enough_leaves &&
      rep.pointwise.slope <= rep.target_pointwise_slope + rep.slack;
  return rep;
}

std::string decay_report_json(const DecayReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << "{\n";
  os << "  \"alpha\": " << r.alpha << ",\n";
  os << "  \"slope_energy\": " << r.energy.slope << ",\n";
  os << "  \"slope_pointwise\": " << r.pointwise.slope << ",\n";
  os << "  \"residuals\": {\"energy\": " << r.energy.residual
     << ", \"pointwise\": " << r.pointwise.residual << "},\n";
  os << "  \"targets\": {\"energy\": " << r.target_energy_slope
     << ", \"pointwise\": " << r.target_pointwise_slope
     << ", \"slack\": " << r.slack << "},\n";
  os << "  \"pass_energy\": " << (r.pass_energy ? "true" : "false") << ",\n";
  os << "  \"pass_pointwise\": " << (r.pass_pointwise ? "true" : "false")
     << ",\n";
  os << "  \"enough_leaves\": " << (r.enough_leaves ? "true" : "false")
     << ",\n";
  os << "  \"points\": " << r.energy.points << "\n";
  os << "}\n";
  return os.str();
}

}  // namespace nlwave
