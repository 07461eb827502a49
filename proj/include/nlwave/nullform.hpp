#ifndef NLWAVE_NULLFORM_HPP
#define NLWAVE_NULLFORM_HPP

#include <optional>
#include <vector>

#include "nlwave/grid.hpp"
#include "nlwave/types.hpp"

namespace nlwave {

// A constant quadratic form vanishes on the light cone xi_0^2 = |xi|^2 iff
// its symmetric part is a multiple of diag(1,-1,-1,-1); c is that multiple.
struct NullCertificate {
  double c = 0.0;
  double sym_residual = 0.0;
  bool is_null = false;
};

// Nonlinearity F = A^{ab} d_a phi d_b phi + kappa phi^3.
struct NullFormSpec {
  Mat4 A{};
  double kappa = 0.0;
  bool enabled = false;
  std::optional<NullCertificate> certificate;
};

// Algebraic symmetric-part test plus a randomized cross-check on 100 null
// covectors (deterministic internal seed).
NullCertificate validate_null_condition(const Mat4& A);

// F = sum_ab A^{ab} (d_a phi)(d_b phi) + kappa phi^3 with d_0 = pi.
// Throws std::invalid_argument on shape mismatch.
std::vector<double> eval_F(const NullFormSpec& spec,
                           const std::vector<double>& pi,
                           const GradientField& grad,
                           const std::vector<double>& phi);

// Pointwise samples of one field entering the weighted-product identity.
struct PointSample {
  double phi = 0.0;
  double pi = 0.0;   // d_t phi
  Vec3 grad{};       // d_i phi
};

// Residual of r^2 N(d phi1, d phi2) = c [phi1 phi2 + r d_r(phi1 phi2)]
//                                     + N(d(r phi1), d(r phi2))
// at radius r in direction omega, where N uses the symmetric part of A and
// c is its multiple of diag(1,-1,-1,-1). Pure algebra on point samples.
double psi_identity_residual_at(const Mat4& A, const PointSample& f1,
                                const PointSample& f2, double r,
                                const Vec3& omega);

// Max of the pointwise residual over a sphere of radius r >= R (flat
// region), sampling both snapshots from the grid. O(h^2) for smooth fields.
double verify_psi_identity(const FieldState& phi1, const FieldState& phi2,
                           const Grid& grid, const Mat4& A, double r,
                           double R, const SphereSampling& sampling);

}  // namespace nlwave

#endif
