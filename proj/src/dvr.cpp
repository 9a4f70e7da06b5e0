#include "heliqsim/dvr.hpp"

#include <algorithm>
#include <cmath>

#include "heliqsim/error.hpp"

namespace heliqsim {

namespace {

constexpr Eigen::Index kMinPoints = 10;

DvrGrid make_grid(Well well, double x_b, double dx, Eigen::Index n) {
  DvrGrid g;
  g.dx = dx;
  g.well = well;
  g.x.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    // Left points are x_b - n dx ... x_b - dx; right points x_b ... x_b + (n-1) dx.
    const double offset = well == Well::Left ? static_cast<double>(k - n)
                                             : static_cast<double>(k);
    g.x[static_cast<std::size_t>(k)] = x_b + offset * dx;
  }
  return g;
}

// Outer position where the trap climbs back to the barrier height, found by
// walking away from the minimum and interpolating linearly. A trap that
// stays below that level up to the grounded channel wall ends at the wall.
double outer_crossing(const PotentialProfile& p, double x_min, double level, int step) {
  const auto& xs = p.x;
  const auto& v = p.v;
  auto i = static_cast<long>(std::lround((x_min - xs.front()) / p.spacing()));
  const long last = static_cast<long>(xs.size()) - 1;
  while (i > 0 && i < last && v[static_cast<std::size_t>(i)] < level) i += step;
  const auto hi = static_cast<std::size_t>(i);
  if (v[hi] < level) return xs[hi];
  const auto lo = static_cast<std::size_t>(i - step);
  const double t = (level - v[lo]) / (v[hi] - v[lo]);
  return xs[lo] + t * (xs[hi] - xs[lo]);
}

}  // namespace

std::pair<DvrGrid, DvrGrid> build_grids(const Barrier& b, double dx,
                                        double margin_left, double margin_right) {
  if (!(dx > 0.0)) throw InvalidArgument("build_grids: dx must be positive");
  const double span_left = b.x_b - (b.x_min_left - margin_left);
  const double span_right = (b.x_min_right + margin_right) - b.x_b;
  // Outward rounding: a span within 1e-9 steps of a whole number is not
  // bumped up by floating-point noise.
  const auto n_left = static_cast<Eigen::Index>(std::ceil(span_left / dx - 1e-9));
  const auto n_right = static_cast<Eigen::Index>(std::ceil(span_right / dx - 1e-9)) + 1;
  if (n_left < kMinPoints || n_right < kMinPoints) {
    throw InvalidArgument("build_grids: fewer than 10 points in a well");
  }
  return {make_grid(Well::Left, b.x_b, dx, n_left),
          make_grid(Well::Right, b.x_b, dx, n_right)};
}

std::pair<DvrGrid, DvrGrid> auto_grids(const PotentialProfile& profile,
                                       const Barrier& barrier,
                                       Eigen::Index points_per_well) {
  if (points_per_well < kMinPoints) {
    throw InvalidArgument("auto_grids: fewer than 10 points per well requested");
  }
  const double left_end = outer_crossing(profile, barrier.x_min_left, barrier.v_b, -1);
  const double right_end = outer_crossing(profile, barrier.x_min_right, barrier.v_b, +1);
  const double span = std::max(barrier.x_b - left_end, right_end - barrier.x_b);
  const auto k = static_cast<double>(points_per_well);
  // Neither grid may leave the sampled profile: the left grid reaches
  // x_b - K dx and the right grid x_b + (K-1) dx. The slack keeps the end
  // points inside after rounding.
  constexpr double slack = 1.0 - 1e-12;
  const double dx = std::min({span / (k - 1.0), slack * (barrier.x_b - profile.x_min()) / k,
                              slack * (profile.x_max() - barrier.x_b) / (k - 1.0)});
  return {make_grid(Well::Left, barrier.x_b, dx, points_per_well),
          make_grid(Well::Right, barrier.x_b, dx, points_per_well)};
}

OneBodyOperator kinetic_matrix(const DvrGrid& grid) {
  const Eigen::Index n = grid.size();
  const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
  constexpr double pi2_over_6 = codata::pi * codata::pi / 6.0;
  OneBodyOperator t{Eigen::MatrixXd(n, n), OperatorKind::Kinetic};
  for (Eigen::Index a = 0; a < n; ++a) {
    t.matrix(a, a) = pi2_over_6 * inv_dx2;
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const auto d = static_cast<double>(a - b);
      const double sign = ((a - b) % 2 == 0) ? 1.0 : -1.0;
      const double value = sign * inv_dx2 / (d * d);
      t.matrix(a, b) = value;
      t.matrix(b, a) = value;
    }
  }
  return t;
}

OneBodyOperator potential_matrix(const DvrGrid& grid, const PotentialProfile& profile) {
  const Eigen::Index n = grid.size();
  OneBodyOperator v{Eigen::MatrixXd::Zero(n, n), OperatorKind::Potential};
  for (Eigen::Index a = 0; a < n; ++a) {
    v.matrix(a, a) = interpolate_potential(profile, grid.x[static_cast<std::size_t>(a)]);
  }
  return v;
}

OneBodyOperator one_body_hamiltonian(const DvrGrid& grid, const PotentialProfile& profile) {
  OneBodyOperator h = kinetic_matrix(grid);
  for (Eigen::Index a = 0; a < grid.size(); ++a) {
    h.matrix(a, a) += interpolate_potential(profile, grid.x[static_cast<std::size_t>(a)]);
  }
  h.kind = OperatorKind::Hamiltonian;
  return h;
}

InteractionDiagonal interaction_diagonal(const DvrGrid& left, const DvrGrid& right,
                                         const PairKernel& kernel) {
  InteractionDiagonal out{Eigen::MatrixXd(left.size(), right.size())};
  for (Eigen::Index g = 0; g < left.size(); ++g) {
    for (Eigen::Index d = 0; d < right.size(); ++d) {
      out.u(g, d) = kernel(left.x[static_cast<std::size_t>(g)],
                           right.x[static_cast<std::size_t>(d)]);
    }
  }
  return out;
}

InteractionDiagonal coulomb_diagonal(const DvrGrid& left, const DvrGrid& right,
                                     double kappa, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("coulomb_diagonal: epsilon must be positive");
  const double eps2 = epsilon * epsilon;
  return interaction_diagonal(left, right, [=](double a, double b) {
    const double d = a - b;
    return kappa / std::sqrt(d * d + eps2);
  });
}

}  // namespace heliqsim
