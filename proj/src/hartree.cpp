#include "heliqsim/hartree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heliqsim/error.hpp"
#include "heliqsim/linalg.hpp"

namespace heliqsim {

std::pair<Eigen::VectorXd, Eigen::VectorXd> mean_field(const InteractionDiagonal& u,
                                                       const Eigen::VectorXd& ground_left,
                                                       const Eigen::VectorXd& ground_right) {
  if (u.u.rows() != ground_left.size() || u.u.cols() != ground_right.size()) {
    throw InvalidArgument("mean_field: interaction shape does not match the orbitals");
  }
  return {u.u * ground_right.cwiseAbs2(), u.u.transpose() * ground_left.cwiseAbs2()};
}

namespace {

double max_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Lowest eigenpairs of h + diag(w), either directly or inside the span of
// a fixed orthonormal basis V (columns), where the matrix is
// diag(lambda) + V^T diag(w) V.
struct WellSolver {
  const Eigen::MatrixXd* h = nullptr;
  Eigen::Index count = 0;
  Eigen::MatrixXd basis;
  Eigen::VectorXd basis_values;

  EigenPairs full(const Eigen::VectorXd& w, Eigen::MatrixXd& fock) const {
    fock = *h;
    fock.diagonal() += w;
    return lowest_eigenpairs(fock, count);
  }

  EigenPairs reduced(const Eigen::VectorXd& w) const {
    Eigen::MatrixXd m = basis.transpose() * w.asDiagonal() * basis;
    m.diagonal() += basis_values;
    EigenPairs sub = symmetric_eigen(0.5 * (m + m.transpose()));
    EigenPairs out{sub.values.head(count), basis * sub.vectors.leftCols(count)};
    fix_column_signs(out.vectors);
    return out;
  }
};

}  // namespace

HartreeBasis scf_solve(const OneBodyOperator& h_left, const OneBodyOperator& h_right,
                       const InteractionDiagonal& u, const ScfSettings& s) {
  const Eigen::Index kl = h_left.matrix.rows();
  const Eigen::Index kr = h_right.matrix.rows();
  if (h_left.matrix.cols() != kl || h_right.matrix.cols() != kr || u.u.rows() != kl ||
      u.u.cols() != kr) {
    throw InvalidArgument("scf_solve: operator shapes are inconsistent");
  }
  if (s.n_left < 0 || s.n_right < 0 || s.n_left + 1 > kl || s.n_right + 1 > kr) {
    throw InvalidArgument("scf_solve: more orbitals requested than grid points");
  }
  if (!(s.tol > 0.0) || s.max_iter < 1) {
    throw InvalidArgument("scf_solve: tol and max_iter must be positive");
  }

  WellSolver left{&h_left.matrix, s.n_left + 1, {}, {}};
  WellSolver right{&h_right.matrix, s.n_right + 1, {}, {}};
  const Eigen::Index m_left = std::min(kl, std::max(s.subspace, s.n_left + 1));
  const Eigen::Index m_right = std::min(kr, std::max(s.subspace, s.n_right + 1));
  bool in_subspace = s.subspace > 0 && m_left < kl && m_right < kr;

  HartreeBasis out;
  EigenPairs el, er;
  if (in_subspace) {
    EigenPairs bl = lowest_eigenpairs(h_left.matrix, m_left);
    EigenPairs br = lowest_eigenpairs(h_right.matrix, m_right);
    el = {bl.values.head(left.count), bl.vectors.leftCols(left.count)};
    er = {br.values.head(right.count), br.vectors.leftCols(right.count)};
    left.basis = std::move(bl.vectors);
    left.basis_values = std::move(bl.values);
    right.basis = std::move(br.vectors);
    right.basis_values = std::move(br.values);
  } else {
    el = lowest_eigenpairs(h_left.matrix, left.count);
    er = lowest_eigenpairs(h_right.matrix, right.count);
  }
  out.fock_left = h_left.matrix;
  out.fock_right = h_right.matrix;

  Eigen::VectorXd wl = Eigen::VectorXd::Zero(kl);
  Eigen::VectorXd wr = Eigen::VectorXd::Zero(kr);
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int it = 1; it <= s.max_iter; ++it) {
    auto [nl, nr] = mean_field(u, el.vectors.col(0), er.vectors.col(0));
    if (out.mixing_used) {
      wl = (1.0 - s.mixing) * wl + s.mixing * nl;
      wr = (1.0 - s.mixing) * wr + s.mixing * nr;
    } else {
      wl = std::move(nl);
      wr = std::move(nr);
    }
    EigenPairs next_l, next_r;
    if (in_subspace) {
      next_l = left.reduced(wl);
      next_r = right.reduced(wr);
    } else {
      next_l = left.full(wl, out.fock_left);
      next_r = right.full(wr, out.fock_right);
      ++out.full_iterations;
    }
    const double change = std::max(max_change(next_l.values, el.values),
                                   max_change(next_r.values, er.values));
    el = std::move(next_l);
    er = std::move(next_r);
    out.iterations = it;
    out.last_change = change;
    if (change < s.tol) {
      if (!in_subspace) {
        out.converged = true;
        break;
      }
      // Converged in the subspace; the remaining iterations run in the full
      // space, where the final test is made.
      in_subspace = false;
      continue;
    }
    if (change < best) {
      best = change;
      since_best = 0;
    } else if (++since_best >= s.stall_window && !out.mixing_used) {
      out.mixing_used = true;
      since_best = 0;
    }
  }

  out.left = std::move(el.vectors);
  out.right = std::move(er.vectors);
  out.eps_left = std::move(el.values);
  out.eps_right = std::move(er.values);
  return out;
}

double hartree_energy(const HartreeBasis& basis, const InteractionDiagonal& u) {
  const Eigen::VectorXd pl = basis.left.col(0).cwiseAbs2();
  const Eigen::VectorXd pr = basis.right.col(0).cwiseAbs2();
  return basis.eps_left(0) + basis.eps_right(0) - pl.dot(u.u * pr);
}

}  // namespace heliqsim
