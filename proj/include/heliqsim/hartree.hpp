#pragma once

#include <Eigen/Dense>

#include "heliqsim/dvr.hpp"

namespace heliqsim {

struct ScfSettings {
  Eigen::Index n_left = 5;   // highest kept orbital index N^L
  Eigen::Index n_right = 5;  // highest kept orbital index N^R
  double tol = 1e-10;
  int max_iter = 500;
  /// Iterations without a new minimum of max|delta eps| before linear
  /// mixing of the mean field is switched on.
  int stall_window = 10;
  double mixing = 0.5;
  /// When positive, iterate first in the span of this many lowest
  /// eigenvectors of h^A and finish with full-space iterations. The
  /// convergence test is always applied to full-space eigenvalues, so the
  /// fixed point is the same as with plain iteration (0).
  Eigen::Index subspace = 0;
};

/// Self-consistent per-well orbitals. Columns of `left`/`right` are
/// orthonormal DVR coefficient vectors, sign-fixed so the largest-magnitude
/// entry is positive.
struct HartreeBasis {
  Eigen::MatrixXd left;       // [K_L+1 x N_L+1]
  Eigen::MatrixXd right;      // [K_R+1 x N_R+1]
  Eigen::VectorXd eps_left;   // ascending
  Eigen::VectorXd eps_right;  // ascending
  Eigen::MatrixXd fock_left;
  Eigen::MatrixXd fock_right;
  int iterations = 0;
  int full_iterations = 0;  // iterations that diagonalized the full Fock matrix
  bool converged = false;
  bool mixing_used = false;
  double last_change = 0.0;
};

/// Mean-field potential felt in each well from the other well's ground
/// orbital: w_L = u (b_R o b_R), w_R = u^T (b_L o b_L).
std::pair<Eigen::VectorXd, Eigen::VectorXd> mean_field(const InteractionDiagonal& u,
                                                       const Eigen::VectorXd& ground_left,
                                                       const Eigen::VectorXd& ground_right);

/// Iterates f^A B^A = B^A eps^A from f^A = h^A until the kept eigenvalues
/// change by less than `tol`. On exhaustion of `max_iter` the last iterate
/// is returned with `converged == false`. If |delta eps| sets no new minimum
/// for `stall_window` iterations, the mean field is mixed linearly with the
/// previous one from then on.
HartreeBasis scf_solve(const OneBodyOperator& h_left, const OneBodyOperator& h_right,
                       const InteractionDiagonal& u, const ScfSettings& settings);

/// Energy of the Hartree product of the two ground orbitals,
/// <00|H|00> = eps^L_0 + eps^R_0 - u_{00,00}.
double hartree_energy(const HartreeBasis& basis, const InteractionDiagonal& u);

}  // namespace heliqsim
