#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "heliqsim/ci.hpp"
#include "heliqsim/dvr.hpp"
#include "heliqsim/hartree.hpp"
#include "heliqsim/units.hpp"

namespace heliqsim {

struct SchmidtDecomposition {
  Eigen::VectorXd singular_values;  // descending, >= 0
  Eigen::MatrixXd left;             // U_{kp}
  Eigen::MatrixXd right;            // V_{lp}
};

/// SVD of a two-body coefficient matrix. Throws InvalidArgument unless
/// the Frobenius norm is 1 within 1e-10.
SchmidtDecomposition schmidt(const Eigen::MatrixXd& coefficients);

/// -sum p log2 p over p = sigma^2, dropping p < 1e-15.
double von_neumann_entropy(const SchmidtDecomposition& d);
double entropy_from_probabilities(std::span<const double> p);
double entanglement_entropy(const Eigen::MatrixXd& coefficients);

/// Single-particle density of a two-body state on the union of the two
/// DVR grids; integrates to 2 with weight dx.
struct Density {
  std::vector<double> x;
  std::vector<double> rho;
};

Density particle_density(const Eigen::MatrixXd& coefficients, const HartreeBasis& basis,
                         const DvrGrid& left, const DvrGrid& right);

/// |Psi(x1, x2)|^2 with x1 on the left grid and x2 on the right grid.
Eigen::MatrixXd pair_density(const Eigen::MatrixXd& coefficients, const HartreeBasis& basis,
                             const DvrGrid& left, const DvrGrid& right);

/// |phi^A_i(x)|^2 on the grid of well A, one column per kept orbital.
Eigen::MatrixXd orbital_densities(const Eigen::MatrixXd& orbitals, const DvrGrid& grid);

/// Frequencies in GHz (cyclic, i.e. E / 2 pi hbar).
struct SpectralObservables {
  double omega_left = 0.0;
  double omega_right = 0.0;
  double beta_left = 0.0;
  double beta_right = 0.0;
  double detuning = 0.0;  // omega_left - omega_right
  double zeta = 0.0;      // E4 - E2 - E1 + E0
  std::vector<double> energies;   // E_n - E_0
  std::vector<double> entropies;  // bits
};

SpectralObservables spectral_observables(const TwoBodySpectrum& spectrum,
                                         const HartreeBasis& basis, const UnitSystem& units);

/// Product state |ij> with the largest weight in eigenstate n.
std::pair<Eigen::Index, Eigen::Index> dominant_product(const TwoBodySpectrum& spectrum,
                                                       Eigen::Index n);

/// Labels every eigenstate by its dominant product state. A product state
/// already claimed by a lower eigenstate is not reused; the next largest
/// weight is taken instead.
std::vector<std::pair<Eigen::Index, Eigen::Index>> product_labels(
    const TwoBodySpectrum& spectrum, Eigen::Index count);

struct GapCoupling {
  double lambda_star = 0.0;
  double g = 0.0;       // half the minimum gap, same unit as the input gaps
  std::size_t index = 0;  // sample nearest the minimum
};

/// Minimum of gap(lambda), refined with the parabola through the minimum
/// sample and its two neighbours. Throws RangeError when the smallest
/// sample sits on the boundary of the sweep.
GapCoupling extract_gap_coupling(std::span<const double> lambdas, std::span<const double> gaps);

/// Matches the lowest `count` eigenvectors of `current` to those of a
/// previous step by maximum overlap. Entry n of the result is the index in
/// `current` that continues state n; `min_overlap` receives the weakest
/// matched |<prev_n|cur>|.
std::vector<Eigen::Index> track_states(const Eigen::MatrixXd& previous,
                                       const Eigen::MatrixXd& current, Eigen::Index count,
                                       double* min_overlap = nullptr);

}  // namespace heliqsim
