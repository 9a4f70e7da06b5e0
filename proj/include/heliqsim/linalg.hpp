#pragma once

#include <Eigen/Dense>

namespace heliqsim {

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // one column per value, orthonormal
};

/// Flips each column so that its largest-magnitude entry is positive.
void fix_column_signs(Eigen::MatrixXd& vectors);

/// The `count` lowest eigenpairs of a dense symmetric matrix (LAPACK dsyevr),
/// sign-fixed. Only the lower triangle is read.
EigenPairs lowest_eigenpairs(const Eigen::MatrixXd& symmetric, Eigen::Index count);

/// Full decomposition of a dense symmetric matrix, sign-fixed.
EigenPairs symmetric_eigen(const Eigen::MatrixXd& symmetric);

}  // namespace heliqsim
