#include <doctest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <random>

#include "heliqsim/effective.hpp"
#include "heliqsim/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace heliqsim;

namespace {

PotentialProfile harmonic_pair(double w, double a, double shift = 0.0) {
  return sample_potential(
      [=](double x) {
        return x < 0.0 ? 0.5 * w * w * (x + a) * (x + a)
                       : 0.5 * w * w * (x - a) * (x - a) + shift * x;
      },
      -8.0, 8.0, 1601);
}

}  // namespace

TEST_CASE("local quadratic fit is exact on quadratics") {
  const auto p = sample_potential([](double x) { return 2.0 * x * x - 3.0 * x + 1.0; }, -2.0,
                                  2.0, 401);
  for (double x : {-1.234, 0.0, 0.5, 1.7}) {
    const LocalFit f = local_quadratic_fit(p, x);
    CHECK(f.value == doctest::Approx(2.0 * x * x - 3.0 * x + 1.0).epsilon(1e-10));
    CHECK(f.slope == doctest::Approx(4.0 * x - 3.0).epsilon(1e-10));
    CHECK(f.curvature == doctest::Approx(4.0).epsilon(1e-10));
  }
}

TEST_CASE("equilibrium positions") {
  SUBCASE("no repulsion: bare minima") {
    const auto p = harmonic_pair(3.0, 2.0);
    const auto eq = equilibrium_positions(p, 0.0);
    CHECK(eq.x_left == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(eq.x_right == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("symmetric harmonic wells against a scalar oracle") {
    const double w = 3.0, a = 2.0, kappa = 5.0;
    const auto eq = equilibrium_positions(harmonic_pair(w, a), kappa);
    CHECK(eq.x_left == doctest::Approx(-eq.x_right).epsilon(1e-10));
    CHECK(eq.d > 2.0 * a);
    CHECK(eq.residual < 1e-12 * kappa);
    // w^2 (s - a) = kappa / (2 s)^2 for the half separation s
    auto f = [=](double s) { return w * w * (s - a) - kappa / (4.0 * s * s); };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 100;
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, a + 1.0, tol, iters);
    CHECK(eq.d == doctest::Approx(lo + hi).epsilon(1e-10));
  }
  SUBCASE("asymmetric wells stay balanced") {
    const double kappa = 3.0;
    const auto p = harmonic_pair(3.0, 2.0, 0.7);
    const auto eq = equilibrium_positions(p, kappa);
    const double force = kappa / (eq.d * eq.d);
    CHECK(local_quadratic_fit(p, eq.x_left).slope == doctest::Approx(-force).epsilon(1e-9));
    CHECK(local_quadratic_fit(p, eq.x_right).slope == doctest::Approx(force).epsilon(1e-9));
  }
  CHECK_THROWS_AS(equilibrium_positions(harmonic_pair(3.0, 2.0), -1.0), InvalidArgument);
}

TEST_CASE("effective parameters") {
  const auto p = effective_params(9.0, 11.0, 10.0, 2326.0);
  CHECK(p.omega_c * p.omega_c == doctest::Approx(4.652).epsilon(1e-12));
  CHECK(p.omega_left * p.omega_left == doctest::Approx(81.0 + 4.652));
  CHECK(p.omega_right * p.omega_right == doctest::Approx(121.0 + 4.652));
  CHECK(p.g == doctest::Approx(4.652 / (2.0 * std::sqrt(p.omega_left * p.omega_right))));
  CHECK(std::tan(2.0 * p.theta) == doctest::Approx(2.0 * p.g / (p.omega_left - p.omega_right)));

  const auto free = effective_params(9.0, 11.0, 10.0, 0.0);
  CHECK(free.g == 0.0);
  CHECK(free.omega_left == 9.0);
  CHECK(free.omega_right == 11.0);

  const auto same = effective_params(10.0, 10.0, 12.0, 100.0);
  CHECK(same.g == doctest::Approx(same.omega_c * same.omega_c / (2.0 * same.omega_left)));

  CHECK_THROWS_AS(effective_params(0.0, 1.0, 10.0, 1.0), NotDoubleWell);
  CHECK_THROWS_AS(effective_params(1.0, 1.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("effective parameters from the device profile") {
  const auto s = testsupport::device_system(testsupport::config_i_voltages(), 60);
  const double kappa = testsupport::test_config().units().kappa;
  const auto eq = equilibrium_positions(s.profile, kappa);
  const auto p = effective_params(s.profile, eq, kappa);
  CHECK(p.d == doctest::Approx(eq.d));
  CHECK(p.omega_c * p.omega_c == doctest::Approx(2.0 * kappa / std::pow(eq.d, 3)));
  CHECK(p.omega_left > p.omega_1);
  CHECK(p.omega_right > p.omega_2);
  CHECK(eq.x_left < s.left.x.back());
  CHECK(eq.x_right > s.right.x.front());
}

TEST_CASE("hybrid modes") {
  const auto uncoupled = hybrid_modes(11.0, 9.0, 0.0);
  CHECK(uncoupled.plus == 11.0);
  CHECK(uncoupled.minus == 9.0);
  const auto resonant = hybrid_modes(10.0, 10.0, 0.2);
  CHECK(resonant.plus == doctest::Approx(10.2));
  CHECK(resonant.minus == doctest::Approx(9.8));
  const auto m = hybrid_modes(11.0, 9.0, 0.113);
  const double half = 0.5 * std::sqrt(4.0 * 0.113 * 0.113 + 4.0);
  CHECK(m.plus == doctest::Approx(10.0 + half).epsilon(1e-14));
  CHECK(m.minus == doctest::Approx(10.0 - half).epsilon(1e-14));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> w(5.0, 15.0), gg(0.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const double a = w(rng), b = w(rng), g = gg(rng);
    const auto h = hybrid_modes(a, b, g);
    CHECK(h.plus + h.minus == doctest::Approx(a + b).epsilon(1e-14));
    CHECK(h.plus - h.minus >= std::abs(a - b));
    // eigenvalues of the exchange matrix [[a, g], [g, b]]
    Eigen::Matrix2d x;
    x << a, g, g, b;
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(x).eigenvalues();
    CHECK(std::abs(h.minus - ev(0)) < 1e-12 * a);
    CHECK(std::abs(h.plus - ev(1)) < 1e-12 * a);
  }
}

TEST_CASE("hybrid modes approach the oscillator normal modes at weak coupling") {
  // exact normal modes of the quadratic form differ from the exchange
  // model at second order in the coupling
  const double w1 = 9.0, w2 = 11.0;
  for (double c : {0.5, 2.0, 8.0}) {
    const auto [lo, hi] = testsupport::normal_modes(w1, w2, c);
    const double g = c / (2.0 * std::sqrt(w1 * w2));
    const auto h = hybrid_modes(w2, w1, g);
    CHECK(std::abs(h.minus - lo) < 2.0 * g * g / (w1 + w2) + 1e-12);
    CHECK(std::abs(h.plus - hi) < 2.0 * g * g / (w1 + w2) + 1e-12);
  }
}

TEST_CASE("effective zeta") {
  CHECK(effective_zeta(0.0, 2.0, 1.0, -1.0).zeta == 0.0);
  CHECK(effective_zeta(0.1, 2.0, 0.0, 0.0).zeta == 0.0);
  CHECK(effective_zeta(0.0, 2.0, 0.3, 0.7).zeta == 0.0);

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> gd(0.01, 0.3), dd(-3.0, 3.0), bd(-1.5, 1.5);
  for (int k = 0; k < 100; ++k) {
    const double g = gd(rng), delta = dd(rng), b = bd(rng);
    CHECK(effective_zeta(g, delta, b, -b).zeta == 0.0);
    const double bl = bd(rng), br = bd(rng);
    const auto z = effective_zeta(g, delta, bl, br);
    const auto mirrored = effective_zeta(g, delta, -br, -bl);
    CHECK(mirrored.zeta == doctest::Approx(-z.zeta).epsilon(1e-12).scale(1e-12));
  }

  // small mixing angles: leading term
  const auto z = effective_zeta(1e-3, 2.0, 1.0, 0.5);
  CHECK(z.zeta == doctest::Approx(z.small_angle).epsilon(1e-4));
  CHECK(z.small_angle == doctest::Approx(2e-6 / 1.5 - 2e-6 / 3.0));
  CHECK_FALSE(z.near_pole);
  CHECK(effective_zeta(0.1, 1.0, -1.0, 0.3).near_pole);
}

TEST_CASE("zeta of the effective model against a two-level-per-mode oracle") {
  // Exchange coupling between |20>,|11>,|02> with sqrt(2) g matrix elements
  // and between |10>,|01> with g, on top of the anharmonic levels.
  const double wl = 10.0, wr = 8.5, bl = 0.4, br = -0.9, g = 0.01;
  Eigen::Matrix2d one;
  one << wl, g, g, wr;
  Eigen::Matrix3d two;
  const double s = std::sqrt(2.0) * g;
  two << 2 * wl + bl, s, 0, s, wl + wr, s, 0, s, 2 * wr + br;
  const Eigen::Vector2d e1 = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(one).eigenvalues();
  const Eigen::Matrix3d v2 = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(two).eigenvectors();
  const Eigen::Vector3d e2 = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(two).eigenvalues();
  // the dressed |11> is the eigenvector with the largest middle weight
  Eigen::Index k = 0;
  v2.row(1).cwiseAbs().maxCoeff(&k);
  const double zeta = e2(k) - e1(0) - e1(1);
  const auto z = effective_zeta(g, wl - wr, bl, br);
  CHECK(z.small_angle == doctest::Approx(zeta).epsilon(1e-3));
  CHECK(z.zeta == doctest::Approx(zeta).epsilon(1e-3));
}

TEST_CASE("resonator coupling") {
  const ResonatorParams p;
  const double mhz = resonator_coupling_mhz(p);
  CHECK(mhz > 6.0);
  CHECK(mhz < 24.0 * 1.0001);
  ResonatorParams flat = p;
  flat.dalpha_dx_per_m = 0.0;
  CHECK(resonator_coupling_mhz(flat) == 0.0);
  ResonatorParams z4 = p;
  z4.z_rf_ohm *= 4.0;
  CHECK(resonator_coupling_mhz(z4) == doctest::Approx(2.0 * mhz));
  ResonatorParams bad = p;
  bad.omega_e_rad_s = 0.0;
  CHECK_THROWS_AS(resonator_coupling_mhz(bad), InvalidArgument);
}
