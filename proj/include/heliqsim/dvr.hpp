#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "heliqsim/electrostatics.hpp"
#include "heliqsim/units.hpp"

namespace heliqsim {

enum class Well { Left, Right };

/// Uniform sinc-DVR collocation grid for one well. The barrier point
/// belongs to the right grid only, which acts as a hard wall between wells.
struct DvrGrid {
  std::vector<double> x;
  double dx = 0.0;
  Well well = Well::Left;

  Eigen::Index size() const { return static_cast<Eigen::Index>(x.size()); }
};

enum class OperatorKind { Kinetic, Potential, Hamiltonian };

struct OneBodyOperator {
  Eigen::MatrixXd matrix;
  OperatorKind kind = OperatorKind::Hamiltonian;
};

/// Pair interaction evaluated on the product quadrature,
/// u(γ, δ) = kernel(x^L_γ, x^R_δ). Diagonal in the DVR product basis.
struct InteractionDiagonal {
  Eigen::MatrixXd u;  // [K_L+1 x K_R+1]
};

using PairKernel = std::function<double(double, double)>;

/// Left grid covers [x_min_left - margin_left, x_b), right grid covers
/// [x_b, x_min_right + margin_right]; both spans are rounded outward to a
/// whole number of dx steps. Throws InvalidArgument for fewer than 10
/// points in a well.
std::pair<DvrGrid, DvrGrid> build_grids(const Barrier& barrier, double dx,
                                        double margin_left, double margin_right);

/// Grids with exactly `points_per_well` points each. The spacing is fixed
/// by the wider well: each grid must reach the outer point where the trap
/// climbs back to the barrier height, or the end of the profile if it never
/// does. The spacing shrinks if needed so both grids stay inside the profile. Every quantity varies continuously
/// with the potential, which keeps finite-difference gradients well-behaved.
std::pair<DvrGrid, DvrGrid> auto_grids(const PotentialProfile& profile,
                                       const Barrier& barrier,
                                       Eigen::Index points_per_well);

OneBodyOperator kinetic_matrix(const DvrGrid& grid);
OneBodyOperator potential_matrix(const DvrGrid& grid, const PotentialProfile& profile);
OneBodyOperator one_body_hamiltonian(const DvrGrid& grid, const PotentialProfile& profile);

/// Soft Coulomb kappa / sqrt((xL - xR)^2 + epsilon^2).
InteractionDiagonal coulomb_diagonal(const DvrGrid& left, const DvrGrid& right,
                                     double kappa, double epsilon);
InteractionDiagonal interaction_diagonal(const DvrGrid& left, const DvrGrid& right,
                                         const PairKernel& kernel);

}  // namespace heliqsim
