#include "heliqsim/linalg.hpp"

#include <lapacke.h>

#include <vector>

#include "heliqsim/error.hpp"

namespace heliqsim {

void fix_column_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

EigenPairs lowest_eigenpairs(const Eigen::MatrixXd& symmetric, Eigen::Index count) {
  const Eigen::Index n = symmetric.rows();
  if (symmetric.cols() != n || count < 1 || count > n) {
    throw InvalidArgument("lowest_eigenpairs: bad shape or count");
  }
  if (!symmetric.allFinite()) throw SolverError("lowest_eigenpairs: non-finite matrix");
  Eigen::MatrixXd work = symmetric;  // dsyevr destroys its input
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(n), work.data(),
      static_cast<lapack_int>(n), 0.0, 0.0, 1, static_cast<lapack_int>(count), 0.0,
      &found, w.data(), z.data(), static_cast<lapack_int>(n), support.data());
  if (info != 0 || found != count) {
    throw SolverError("lowest_eigenpairs: dsyevr failed (info " + std::to_string(info) + ")");
  }
  EigenPairs out{w.head(count), std::move(z)};
  fix_column_signs(out.vectors);
  return out;
}

EigenPairs symmetric_eigen(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols()) {
    throw InvalidArgument("symmetric_eigen: matrix is not square");
  }
  if (!symmetric.allFinite()) throw SolverError("symmetric_eigen: non-finite matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  if (es.info() != Eigen::Success) throw SolverError("symmetric_eigen: no convergence");
  EigenPairs out{es.eigenvalues(), es.eigenvectors()};
  fix_column_signs(out.vectors);
  return out;
}

}  // namespace heliqsim
