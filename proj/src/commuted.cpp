#include <cmath>

#include "nlwave/foliation.hpp"

namespace nlwave {

namespace {

// Discrete covariant wave operator applied to a 3-level sequence, with
// coefficients evaluated at (t_center, x). seq[0], seq[1], seq[2] are
// consecutive levels of the field; the result lives at the center level.
std::vector<double> box_of_sequence(const std::vector<double>* seq,
                                    const Grid& g, const MetricSpec& spec,
                                    double t_center, double dt) {
  const std::size_t N = g.size();
  std::vector<double> dt1(N), dt2(N);
  for (std::size_t c = 0; c < N; ++c) {
    dt1[c] = (seq[2][c] - seq[0][c]) / (2.0 * dt);
    dt2[c] = (seq[2][c] - 2.0 * seq[1][c] + seq[0][c]) / (dt * dt);
  }
  const GradientField gdt1 = spatial_gradient(dt1, g);
  const GradientField gmid = spatial_gradient(seq[1], g);
  std::vector<double> H[6];
  const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  for (int q = 0; q < 6; ++q)
    H[q] = second_derivative(seq[1], g, pairs[q][0], pairs[q][1]);

  std::vector<double> out(N, 0.0);
  const int n = g.n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.idx(i, j, k);
        const MetricSample m = eval_metric(spec, t_center, g.coord(i, j, k));
        const double hij = m.g_inv[1][1] * H[0][c] + m.g_inv[2][2] * H[1][c] +
                           m.g_inv[3][3] * H[2][c] +
                           2.0 * (m.g_inv[1][2] * H[3][c] +
                                  m.g_inv[1][3] * H[4][c] +
                                  m.g_inv[2][3] * H[5][c]);
        const double mixed = 2.0 * (m.g_inv[0][1] * gdt1.x[c] +
                                    m.g_inv[0][2] * gdt1.y[c] +
                                    m.g_inv[0][3] * gdt1.z[c]);
        const double drift = m.b[0] * dt1[c] + m.b[1] * gmid.x[c] +
                             m.b[2] * gmid.y[c] + m.b[3] * gmid.z[c];
        out[c] = m.g_inv[0][0] * dt2[c] + mixed + hij + drift;
      }
  return out;
}

std::vector<double> time_diff1(const std::vector<double>& a,
                               const std::vector<double>& b, double dt) {
  std::vector<double> out(a.size());
  for (std::size_t c = 0; c < a.size(); ++c)
    out[c] = (b[c] - a[c]) / (2.0 * dt);
  return out;
}

}  // namespace

CommutatorResidual commutator_residual(const std::deque<RingEntry>& ring,
                                       const Grid& grid,
                                       const MetricSpec& metric,
                                       CommuteField X) {
  CommutatorResidual out;
  const double Rhalf = metric.support_radius();
  const int n = grid.n;

  if (X == CommuteField::T) {
    if (ring.size() < 5)
      throw std::invalid_argument(
          "commutator_residual: T variant needs a ring of 5 levels");
    const std::size_t base = ring.size() - 5;
    const double dt = ring[base + 1].t - ring[base].t;
    const double tc = ring[base + 2].t;

    // T phi as a 3-level sequence (levels 1..3 of the ring).
    std::vector<double> u[3];
    for (int m = 0; m < 3; ++m)
      u[m] = time_diff1(ring[base + m].phi, ring[base + m + 2].phi, dt);
    std::vector<double> box_u =
        box_of_sequence(u, grid, metric, tc, dt);

    // T of (box phi): box phi at levels 1..3, each from its own 3 levels.
    std::vector<double> w[3];
    for (int m = 0; m < 3; ++m) {
      std::vector<double> s3[3] = {ring[base + m].phi, ring[base + m + 1].phi,
                                   ring[base + m + 2].phi};
      w[m] = box_of_sequence(s3, grid, metric, ring[base + m + 1].t, dt);
    }
    std::vector<double> t_boxphi = time_diff1(w[0], w[2], dt);

    // Closed-form commutator: -d_t g^{ab} d_ab phi - d_t b^b d_b phi.
    const std::vector<double>& phic = ring[base + 2].phi;
    std::vector<double> dt1(grid.size()), dt2(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
      dt1[c] = (ring[base + 3].phi[c] - ring[base + 1].phi[c]) / (2.0 * dt);
      dt2[c] = (ring[base + 3].phi[c] - 2.0 * phic[c] + ring[base + 1].phi[c]) /
               (dt * dt);
    }
    const GradientField gdt1 = spatial_gradient(dt1, grid);
    const GradientField gc = spatial_gradient(phic, grid);
    std::vector<double> H[6];
    const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    for (int q = 0; q < 6; ++q)
      H[q] = second_derivative(phic, grid, pairs[q][0], pairs[q][1]);

    for (int k = 4; k <= n - 5; ++k)
      for (int j = 4; j <= n - 5; ++j)
        for (int i = 4; i <= n - 5; ++i) {
          const std::size_t c = grid.idx(i, j, k);
          const Vec3 x = grid.coord(i, j, k);
          const double r = norm3(x);
          const double lhs = box_u[c] - t_boxphi[c];
          double rhs = 0.0;
          if (r < Rhalf) {
            const MetricTimeDerivs td =
                eval_metric_time_derivs(metric, tc, x);
            const double hess[4][4] = {
                {dt2[c], gdt1.x[c], gdt1.y[c], gdt1.z[c]},
                {gdt1.x[c], H[0][c], H[3][c], H[4][c]},
                {gdt1.y[c], H[3][c], H[1][c], H[5][c]},
                {gdt1.z[c], H[4][c], H[5][c], H[2][c]}};
            const double dphi[4] = {dt1[c], gc.x[c], gc.y[c], gc.z[c]};
            for (int a = 0; a < 4; ++a) {
              rhs -= td.dt_b[a] * dphi[a];
              for (int b = 0; b < 4; ++b)
                rhs -= td.dt_g_inv[a][b] * hess[a][b];
            }
          }
          out.max_residual = std::max(out.max_residual, std::abs(lhs - rhs));
          if (r > Rhalf + 2.0 * grid.h)
            out.max_outside_support =
                std::max(out.max_outside_support, std::abs(lhs));
          double scale = std::abs(dt1[c]) + std::abs(gc.x[c]) +
                         std::abs(gc.y[c]) + std::abs(gc.z[c]);
          for (int q = 0; q < 6; ++q) scale += std::abs(H[q][c]);
          out.field_scale = std::max(out.field_scale, scale);
        }
    return out;
  }

  // Omega variant: residual box(Omega phi) - Omega(box phi); supported in
  // the cylinder up to stencil accuracy, bounded by a multiple of H there.
  if (ring.size() < 3)
    throw std::invalid_argument(
        "commutator_residual: Omega variant needs a ring of 3 levels");
  const std::size_t base = ring.size() - 3;
  const double dt = ring[base + 1].t - ring[base].t;
  const double tc = ring[base + 1].t;

  const int gens[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (auto [a, b] : gens) {
    std::vector<double> u[3], s3[3];
    for (int m = 0; m < 3; ++m) {
      u[m] = apply_omega(ring[base + m].phi, grid, a, b);
      s3[m] = ring[base + m].phi;
    }
    std::vector<double> box_u = box_of_sequence(u, grid, metric, tc, dt);
    std::vector<double> boxphi = box_of_sequence(s3, grid, metric, tc, dt);
    std::vector<double> om_box = apply_omega(boxphi, grid, a, b);
    for (int k = 4; k <= n - 5; ++k)
      for (int j = 4; j <= n - 5; ++j)
        for (int i = 4; i <= n - 5; ++i) {
          const std::size_t c = grid.idx(i, j, k);
          const double r = norm3(grid.coord(i, j, k));
          const double lhs = box_u[c] - om_box[c];
          out.max_residual = std::max(out.max_residual, std::abs(lhs));
          if (r > Rhalf + 2.0 * grid.h)
            out.max_outside_support =
                std::max(out.max_outside_support, std::abs(lhs));
        }
  }
  return out;
}

double commuted_interior_energy(const std::deque<RingEntry>& ring,
                                const Grid& grid, const SphereSampling& sph,
                                double R, int k, int j) {
  if (k < 0 || j < 0 || k > 2 || j > 2)
    throw std::invalid_argument(
        "commuted_interior_energy: desk-scale depth is k <= 2, j <= 2");
  if (ring.size() < 3)
    throw std::invalid_argument(
        "commuted_interior_energy: insufficient ring depth");
  const std::size_t base = ring.size() - 3;
  const double dt = ring[base + 1].t - ring[base].t;

  // T^j phi and T^j pi at the center level.
  std::vector<double> fphi, fpi;
  const std::size_t N = grid.size();
  fphi.resize(N);
  fpi.resize(N);
  if (j == 0) {
    fphi = ring[base + 1].phi;
    fpi = ring[base + 1].pi;
  } else if (j == 1) {
    for (std::size_t c = 0; c < N; ++c) {
      fphi[c] = (ring[base + 2].phi[c] - ring[base].phi[c]) / (2.0 * dt);
      fpi[c] = (ring[base + 2].pi[c] - ring[base].pi[c]) / (2.0 * dt);
    }
  } else {
    for (std::size_t c = 0; c < N; ++c) {
      fphi[c] = (ring[base + 2].phi[c] - 2.0 * ring[base + 1].phi[c] +
                 ring[base].phi[c]) /
                (dt * dt);
      fpi[c] = (ring[base + 2].pi[c] - 2.0 * ring[base + 1].pi[c] +
                ring[base].pi[c]) /
               (dt * dt);
    }
  }

  // Omega^k applied as every ordered k-tuple of generators, energies summed.
  std::vector<std::pair<std::vector<double>, std::vector<double>>> fields;
  fields.emplace_back(fphi, fpi);
  const int gens[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int depth = 0; depth < k; ++depth) {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> nxt;
    for (auto& f : fields)
      for (auto [a, b] : gens)
        nxt.emplace_back(apply_omega(f.first, grid, a, b),
                         apply_omega(f.second, grid, a, b));
    fields.swap(nxt);
  }

  double total = 0.0;
  for (auto& f : fields) {
    const GradientField gf = spatial_gradient(f.first, grid);
    total += ball_quadrature(grid, sph, R, [&](const Vec3& p, double) {
      const double pp = trilinear(f.second, grid, p);
      const Vec3 gr = {trilinear(gf.x, grid, p), trilinear(gf.y, grid, p),
                       trilinear(gf.z, grid, p)};
      return pp * pp + gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2];
    });
  }
  return total;
}

}  // namespace nlwave
