#include "heliqsim/ci.hpp"

#include "heliqsim/error.hpp"
#include "heliqsim/linalg.hpp"

namespace heliqsim {

Eigen::MatrixXd TwoBodySpectrum::coefficients(Eigen::Index n) const {
  if (n < 0 || n >= size()) throw InvalidArgument("coefficients: state index out of range");
  Eigen::MatrixXd c(n_left, n_right);
  for (Eigen::Index i = 0; i < n_left; ++i) {
    for (Eigen::Index j = 0; j < n_right; ++j) c(i, j) = vectors(i * n_right + j, n);
  }
  return c;
}

Eigen::MatrixXd transform_one_body(const Eigen::MatrixXd& h, const Eigen::MatrixXd& b) {
  if (h.rows() != h.cols() || h.cols() != b.rows()) {
    throw InvalidArgument("transform_one_body: shape mismatch");
  }
  Eigen::MatrixXd t = b.transpose() * h * b;
  return 0.5 * (t + t.transpose());
}

TwoBodyTensor transform_two_body(const InteractionDiagonal& u, const Eigen::MatrixXd& bl,
                                 const Eigen::MatrixXd& br) {
  if (u.u.rows() != bl.rows() || u.u.cols() != br.rows()) {
    throw InvalidArgument("transform_two_body: shape mismatch");
  }
  const Eigen::Index nl = bl.cols();
  const Eigen::Index nr = br.cols();
  // P(a, ik) = B^L_ai B^L_ak and Q(b, jl) = B^R_bj B^R_bl; then
  // u_{ij,kl} = sum_ab P(a, ik) u_ab Q(b, jl).
  Eigen::MatrixXd p(bl.rows(), nl * nl);
  for (Eigen::Index i = 0; i < nl; ++i) {
    for (Eigen::Index k = 0; k < nl; ++k) p.col(i * nl + k) = bl.col(i).cwiseProduct(bl.col(k));
  }
  Eigen::MatrixXd q(br.rows(), nr * nr);
  for (Eigen::Index j = 0; j < nr; ++j) {
    for (Eigen::Index l = 0; l < nr; ++l) q.col(j * nr + l) = br.col(j).cwiseProduct(br.col(l));
  }
  const Eigen::MatrixXd m = p.transpose() * u.u * q;  // [(i,k) x (j,l)]

  TwoBodyTensor t{Eigen::MatrixXd(nl * nr, nl * nr), nl, nr};
  for (Eigen::Index i = 0; i < nl; ++i) {
    for (Eigen::Index j = 0; j < nr; ++j) {
      for (Eigen::Index k = 0; k < nl; ++k) {
        for (Eigen::Index l = 0; l < nr; ++l) {
          t.data(i * nr + j, k * nr + l) = m(i * nl + k, j * nr + l);
        }
      }
    }
  }
  t.data = 0.5 * (t.data + t.data.transpose()).eval();
  return t;
}

Eigen::MatrixXd assemble_ci(const Eigen::MatrixXd& hl, const Eigen::MatrixXd& hr,
                            const TwoBodyTensor& u) {
  const Eigen::Index nl = hl.rows();
  const Eigen::Index nr = hr.rows();
  if (hl.cols() != nl || hr.cols() != nr || u.n_left != nl || u.n_right != nr) {
    throw InvalidArgument("assemble_ci: shape mismatch");
  }
  Eigen::MatrixXd h = u.data;
  for (Eigen::Index i = 0; i < nl; ++i) {
    for (Eigen::Index j = 0; j < nr; ++j) {
      for (Eigen::Index k = 0; k < nl; ++k) h(i * nr + j, k * nr + j) += hl(i, k);
      for (Eigen::Index l = 0; l < nr; ++l) h(i * nr + j, i * nr + l) += hr(j, l);
    }
  }
  return h;
}

TwoBodySpectrum diagonalize_ci(const Eigen::MatrixXd& ci_matrix, Eigen::Index n_left,
                               Eigen::Index n_right) {
  if (ci_matrix.rows() != n_left * n_right) {
    throw InvalidArgument("diagonalize_ci: matrix size does not match the basis");
  }
  EigenPairs e = symmetric_eigen(ci_matrix);
  return {std::move(e.values), std::move(e.vectors), n_left, n_right};
}

TwoBodySpectrum solve_ci(const OneBodyOperator& h_left, const OneBodyOperator& h_right,
                         const InteractionDiagonal& u, const HartreeBasis& basis) {
  const Eigen::MatrixXd hl = transform_one_body(h_left.matrix, basis.left);
  const Eigen::MatrixXd hr = transform_one_body(h_right.matrix, basis.right);
  const TwoBodyTensor ut = transform_two_body(u, basis.left, basis.right);
  return diagonalize_ci(assemble_ci(hl, hr, ut), basis.left.cols(), basis.right.cols());
}

}  // namespace heliqsim
