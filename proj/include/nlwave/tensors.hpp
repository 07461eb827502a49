#ifndef NLWAVE_TENSORS_HPP
#define NLWAVE_TENSORS_HPP

#include "nlwave/metric.hpp"
#include "nlwave/multiplier.hpp"
#include "nlwave/types.hpp"

namespace nlwave {

// T_uv = d_u phi d_v phi - (1/2) g_uv d^c phi d_c phi.
Mat4 stress_energy(const Vec4& dphi, const MetricSample& m);

enum class MultiplierField { T, radial_f };

// Flux densities of the (modified, for radial_f) current and the bulk
// scalar K^X = T^{uv} pi^X_{uv}.
//   spacelike_density: J_u n^u per coordinate volume dx on a t = const
//     slice, i.e. -g^{0u} J~_u sqrt(-G).
//   null_density: J~_u n^u per r^2 dv domega on an outgoing cone in the
//     flat region (needs x to build d_r and the radial field there).
struct CurrentOutput {
  double spacelike_density = 0.0;
  double null_density = 0.0;
  double K = 0.0;
};

CurrentOutput currents(MultiplierField X, const Vec4& dphi, double phi,
                       const MetricSample& m, const Vec3& x,
                       const MultiplierProfile& profile);

}  // namespace nlwave

#endif
