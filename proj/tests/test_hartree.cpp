#include <doctest.h>

#include <cmath>

#include "heliqsim/error.hpp"
#include "heliqsim/hartree.hpp"
#include "heliqsim/linalg.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace heliqsim;

namespace {

testsupport::SmallSystem symmetric_quartic(double coupling) {
  // quartic wells at -2 and 2, split at the barrier
  auto v = [](double x) { return 8.0 * (x * x - 4.0) * (x * x - 4.0); };
  const auto s = testsupport::split_system(v, 0.0, 0.05, 90, 91);
  testsupport::SmallSystem out;
  out.left = s.left;
  out.right = s.right;
  out.profile = s.profile;
  out.h_left = one_body_hamiltonian(s.left, s.profile);
  out.h_right = one_body_hamiltonian(s.right, s.profile);
  out.u = coulomb_diagonal(s.left, s.right, coupling, 1e-2);
  return out;
}

}  // namespace

TEST_CASE("mean field of the other ground orbital") {
  InteractionDiagonal u{Eigen::MatrixXd(2, 3)};
  u.u << 1, 2, 3, 4, 5, 6;
  Eigen::VectorXd gl(2), gr(3);
  gl << 0.6, 0.8;
  gr << 1.0, 0.0, 0.0;
  auto [wl, wr] = mean_field(u, gl, gr);
  CHECK(wl(0) == doctest::Approx(1.0));
  CHECK(wl(1) == doctest::Approx(4.0));
  CHECK(wr(0) == doctest::Approx(0.36 + 4 * 0.64));
  CHECK(wr(2) == doctest::Approx(3 * 0.36 + 6 * 0.64));
  CHECK_THROWS_AS(mean_field(u, gr, gl), InvalidArgument);
}

TEST_CASE("no interaction: one sweep reproduces the bare orbitals") {
  const auto s = symmetric_quartic(0.0);
  ScfSettings scf;
  const auto basis = scf_solve(s.h_left, s.h_right, s.u, scf);
  CHECK(basis.converged);
  CHECK(basis.iterations == 1);
  const auto bare = lowest_eigenpairs(s.h_left.matrix, 6);
  CHECK((basis.eps_left - bare.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((basis.left - bare.vectors).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("symmetric wells give equal orbital energies") {
  const auto s = symmetric_quartic(5.0);
  ScfSettings scf;
  const auto basis = scf_solve(s.h_left, s.h_right, s.u, scf);
  REQUIRE(basis.converged);
  // The left grid mirrors the right grid minus the barrier point. Low
  // orbitals hardly reach the barrier; the top ones tunnel into it.
  CHECK((basis.eps_left - basis.eps_right).head(3).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((basis.eps_left - basis.eps_right).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(basis.eps_left(0) > lowest_eigenpairs(s.h_left.matrix, 1).values(0));
}

TEST_CASE("converged orbitals solve the Fock equations") {
  const auto s = testsupport::device_system(testsupport::config_i_voltages(), 120);
  ScfSettings scf;
  const auto basis = scf_solve(s.h_left, s.h_right, s.u, scf);
  REQUIRE(basis.converged);
  CHECK(basis.last_change < scf.tol);

  const Eigen::Index k = basis.left.cols();
  CHECK(k == 6);
  CHECK((basis.left.transpose() * basis.left - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-12);
  CHECK((basis.right.transpose() * basis.right - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-12);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index arg = 0;
    basis.left.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(basis.left(arg, c) > 0.0);
  }
  for (Eigen::Index c = 1; c < k; ++c) CHECK(basis.eps_left(c) > basis.eps_left(c - 1));

  // Fock operator rebuilt from the converged ground orbitals
  auto [wl, wr] = mean_field(s.u, basis.left.col(0), basis.right.col(0));
  Eigen::MatrixXd fl = s.h_left.matrix;
  fl.diagonal() += wl;
  Eigen::MatrixXd fr = s.h_right.matrix;
  fr.diagonal() += wr;
  CHECK((fl * basis.left - basis.left * basis.eps_left.asDiagonal()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((fr * basis.right - basis.right * basis.eps_right.asDiagonal()).cwiseAbs().maxCoeff() <
        1e-6);
}

TEST_CASE("subspace start converges to the same fixed point") {
  const auto s = testsupport::device_system(testsupport::config_i_voltages(), 200);
  ScfSettings plain;
  ScfSettings fast = plain;
  fast.subspace = 40;
  const auto a = scf_solve(s.h_left, s.h_right, s.u, plain);
  const auto b = scf_solve(s.h_left, s.h_right, s.u, fast);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(b.full_iterations < a.full_iterations);
  CHECK((a.eps_left - b.eps_left).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((a.eps_right - b.eps_right).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((a.left - b.left).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Hartree energy bounds the interacting ground state") {
  const auto s = testsupport::device_system(testsupport::config_i_voltages(), 120);
  HartreeBasis basis;
  const auto spec = testsupport::hartree_ci(s, 5, &basis);
  const double eh = hartree_energy(basis, s.u);
  CHECK(spec.energies(0) <= eh + 1e-10);
  // <00|H|00> computed from the one-body matrices directly
  const Eigen::VectorXd pl = basis.left.col(0).cwiseAbs2();
  const Eigen::VectorXd pr = basis.right.col(0).cwiseAbs2();
  const double direct = basis.left.col(0).dot(s.h_left.matrix * basis.left.col(0)) +
                        basis.right.col(0).dot(s.h_right.matrix * basis.right.col(0)) +
                        pl.dot(s.u.u * pr);
  CHECK(eh == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("iteration limit") {
  const auto s = testsupport::device_system(testsupport::config_i_voltages(), 60);
  ScfSettings scf;
  scf.max_iter = 1;
  scf.tol = 1e-14;
  const auto basis = scf_solve(s.h_left, s.h_right, s.u, scf);
  CHECK_FALSE(basis.converged);
  CHECK(basis.iterations == 1);
  CHECK(basis.eps_left.size() == 6);
}

TEST_CASE("argument validation") {
  const auto s = symmetric_quartic(1.0);
  ScfSettings scf;
  scf.n_left = 500;
  CHECK_THROWS_AS(scf_solve(s.h_left, s.h_right, s.u, scf), InvalidArgument);
  scf = ScfSettings{};
  scf.tol = 0.0;
  CHECK_THROWS_AS(scf_solve(s.h_left, s.h_right, s.u, scf), InvalidArgument);
  InteractionDiagonal bad{Eigen::MatrixXd::Zero(3, 3)};
  CHECK_THROWS_AS(scf_solve(s.h_left, s.h_right, bad, ScfSettings{}), InvalidArgument);
}
