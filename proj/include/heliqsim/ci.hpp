#pragma once

#include <Eigen/Dense>
#include <vector>

#include "heliqsim/dvr.hpp"
#include "heliqsim/hartree.hpp"

namespace heliqsim {

/// Two-body tensor u_{ij,kl} stored as a matrix with row (i,j) and column
/// (k,l), both paired row-major as i*(N_R+1)+j.
struct TwoBodyTensor {
  Eigen::MatrixXd data;
  Eigen::Index n_left = 0;   // N_L + 1
  Eigen::Index n_right = 0;  // N_R + 1

  double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l) const {
    return data(i * n_right + j, k * n_right + l);
  }
};

struct TwoBodySpectrum {
  Eigen::VectorXd energies;   // ascending, dimensionless
  Eigen::MatrixXd vectors;    // column n holds C_{ij,n} flattened row-major
  Eigen::Index n_left = 0;
  Eigen::Index n_right = 0;

  Eigen::Index size() const { return energies.size(); }
  /// C_{ij,n} reshaped to [N_L+1 x N_R+1].
  Eigen::MatrixXd coefficients(Eigen::Index n) const;
};

Eigen::MatrixXd transform_one_body(const Eigen::MatrixXd& h, const Eigen::MatrixXd& b);

TwoBodyTensor transform_two_body(const InteractionDiagonal& u, const Eigen::MatrixXd& b_left,
                                 const Eigen::MatrixXd& b_right);

/// H_{ij,kl} = h^L_{ik} d_{jl} + d_{ik} h^R_{jl} + u_{ij,kl}.
Eigen::MatrixXd assemble_ci(const Eigen::MatrixXd& h_left, const Eigen::MatrixXd& h_right,
                            const TwoBodyTensor& u);

TwoBodySpectrum diagonalize_ci(const Eigen::MatrixXd& ci_matrix, Eigen::Index n_left,
                               Eigen::Index n_right);

/// Full chain from DVR operators and converged orbitals to the spectrum.
TwoBodySpectrum solve_ci(const OneBodyOperator& h_left, const OneBodyOperator& h_right,
                         const InteractionDiagonal& u, const HartreeBasis& basis);

}  // namespace heliqsim
