#include <doctest.h>

#include <cmath>
#include <random>

#include "heliqsim/error.hpp"
#include "heliqsim/optimizer.hpp"
#include "heliqsim/pipeline.hpp"
#include "support.hpp"

using namespace heliqsim;

namespace {

struct Quadratic {
  Eigen::MatrixXd a;
  Eigen::VectorXd centre;

  double operator()(std::span<const double> v) const {
    const Eigen::VectorXd d =
        Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())) - centre;
    return d.dot(a * d);
  }
};

Quadratic make_quadratic(unsigned seed) {
  std::srand(seed);
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(7, 7)).householderQ();
  Eigen::VectorXd diag(7);
  diag << 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0;
  Quadratic f;
  f.a = q * diag.asDiagonal() * q.transpose();
  f.centre = Eigen::VectorXd::LinSpaced(7, -3.0, 3.0);
  return f;
}

Pipeline small_pipeline(double kappa_scale = 1.0) {
  auto c = testsupport::test_config();
  c.points_per_well = 80;
  c.kappa_scale = kappa_scale;
  return Pipeline(testsupport::default_table(), c.pipeline_settings());
}

}  // namespace

TEST_CASE("cost functions") {
  SpectralObservables o;
  o.omega_left = 11.0;
  o.omega_right = 9.0;
  o.beta_left = 1.0;
  o.beta_right = -1.0;
  CHECK(cost_config_I(o) == 0.0);
  o.omega_left = 10.0;
  o.beta_right = -1.5;
  CHECK(cost_config_I(o) == doctest::Approx(1.25));

  SpectralObservables t;
  t.beta_left = 1.0;
  t.beta_right = -1.0;
  t.detuning = -1.0;
  t.entropies = {0.0, 0.0, 0.0, 1.5, 1.0, 1.5};
  CHECK(cost_config_III(t) == 0.0);
  t.entropies[1] = 0.1;
  t.entropies[4] = 0.8;
  CHECK(cost_config_III(t) == doctest::Approx(0.01 + 0.04));
  t.entropies.resize(4);
  CHECK_THROWS_AS(cost_config_III(t), InvalidArgument);
}

TEST_CASE("finite-difference gradient") {
  const Quadratic f = make_quadratic(1);
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7};
  const Eigen::VectorXd exact =
      2.0 * f.a * (Eigen::Map<const Eigen::VectorXd>(v.data(), 7) - f.centre);
  const FdGradient g = fd_gradient(f, v, 1e-3);
  CHECK(g.ok);
  CHECK(g.one_sided == 0);
  CHECK((g.gradient - exact).cwiseAbs().maxCoeff() < 1e-8);

  const FdGradient parallel = fd_gradient(f, v, 1e-3, f(v), 3);
  CHECK((parallel.gradient - g.gradient).norm() == 0.0);

  // linear function: exact for any step
  auto lin = [](std::span<const double> x) { return 3.0 * x[0] - 2.0 * x[1]; };
  const FdGradient gl = fd_gradient(lin, std::vector<double>{0.3, 0.4}, 0.5);
  CHECK(gl.gradient(0) == doctest::Approx(3.0));
  CHECK(gl.gradient(1) == doctest::Approx(-2.0));

  // invalid above x0 = 0: one-sided from below
  auto wall = [](std::span<const double> x) {
    return x[0] > 0.0 ? std::numeric_limits<double>::quiet_NaN() : x[0] * x[0] + x[1];
  };
  const std::vector<double> at{-1e-4, 1.0};
  const FdGradient gw = fd_gradient(wall, at, 1e-3, wall(at));
  CHECK(gw.ok);
  CHECK(gw.one_sided == 1);
  CHECK(gw.gradient(1) == doctest::Approx(1.0));
  const FdGradient lost = fd_gradient(wall, at, 1e-3);
  CHECK_FALSE(lost.ok);
  CHECK_THROWS_AS(fd_gradient(lin, at, 0.0), InvalidArgument);
}

TEST_CASE("ADAM on a convex quadratic") {
  const Quadratic f = make_quadratic(2);
  OptimizerConfig cfg;
  cfg.cost_tol = 1e-14;
  cfg.max_iters = 20000;
  const std::vector<double> start{5, -4, 3, 0, 2, -1, 8};
  const AdamResult r = adam_minimize(f, start, cfg);
  CHECK_FALSE(r.failed);
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.best.data(), 7);
  CHECK((x - f.centre).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(r.best_cost <= f(start));
  CHECK(r.history.front().cost == doctest::Approx(f(start)));
}

TEST_CASE("ADAM bookkeeping") {
  const Quadratic f = make_quadratic(3);
  OptimizerConfig cfg;
  cfg.max_iters = 5;
  std::vector<double> centre(f.centre.data(), f.centre.data() + 7);

  const AdamResult done = adam_minimize(f, centre, cfg);
  CHECK(done.reached_tol);
  CHECK(done.iterations == 0);
  CHECK(done.best == centre);

  int calls = 0;
  const std::vector<double> start{4, 4, 4, 4, 4, 4, 4};
  const AdamResult few = adam_minimize(f, start, cfg, [&](const AdamRecord&) { ++calls; });
  CHECK(calls == 6);
  CHECK(few.history.size() == 6);
  CHECK_FALSE(few.reached_tol);
  CHECK(few.best_cost <= f(start));
  for (const auto& h : few.history) CHECK(h.cost >= few.best_cost);

  auto nowhere = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
  const AdamResult fail = adam_minimize(nowhere, start, cfg);
  CHECK(fail.failed);
  CHECK(fail.best == start);

  cfg.learning_rate_mv = 0.0;
  CHECK_THROWS_AS(adam_minimize(f, start, cfg), InvalidArgument);
}

TEST_CASE("plateau decay lowers the learning rate") {
  // |x| has a kink: plain ADAM keeps bouncing until the rate decays
  auto kink = [](std::span<const double> x) { return std::abs(x[0] - 0.05) + 1.0; };
  OptimizerConfig cfg;
  cfg.max_iters = 300;
  cfg.fd_step_mv = 1e-6;
  const AdamResult r = adam_minimize(kink, std::vector<double>{3.0}, cfg);
  CHECK(r.history.back().learning_rate_mv < cfg.learning_rate_mv);
  CHECK(r.history.back().learning_rate_mv >= cfg.min_learning_rate_mv);
  CHECK(std::abs(r.best[0] - 0.05) < 0.01);
}

TEST_CASE("multi-start is deterministic") {
  const Quadratic f = make_quadratic(4);
  OptimizerConfig cfg;
  cfg.max_iters = 10;
  const std::vector<double> start{9, 9, 9, 9, 9, 9, 9};
  const AdamResult a = multi_start(f, start, cfg, 2, 5.0, 42);
  const AdamResult b = multi_start(f, start, cfg, 2, 5.0, 42);
  CHECK(a.best == b.best);
  CHECK(a.history.size() == 33);
  CHECK(a.best_cost <= adam_minimize(f, start, cfg).best_cost);
}

TEST_CASE("parametrization") {
  const std::vector<double> a{1, 2}, b{3, 6};
  CHECK(parametrize(a, b, 0.0) == a);
  CHECK(parametrize(a, b, 1.0) == b);
  CHECK(parametrize(a, b, 0.5) == std::vector<double>{2, 4});
  CHECK(parametrize(a, b, 2.0) == std::vector<double>{5, 10});
  CHECK_THROWS_AS(parametrize(a, std::vector<double>{1}, 0.5), InvalidArgument);
  const auto g = lambda_grid(0.0, 2.0, 5);
  CHECK(g == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK(lambda_grid(0.3, 1.0, 1) == std::vector<double>{0.3});
  CHECK_THROWS_AS(lambda_grid(0.0, 1.0, 0), InvalidArgument);
}

TEST_CASE("pipeline cache and validation") {
  const Pipeline p = small_pipeline();
  const auto v = testsupport::config_i_voltages();
  const auto a = p.evaluate(v);
  const auto b = p.evaluate(v);
  CHECK(a.get() == b.get());
  CHECK(p.evaluations() == 1);
  CHECK(p.cache_hits() == 1);
  CHECK(a->basis.converged);
  CHECK(a->observables.energies.size() == 36);

  auto bad = v;
  bad[0] = 1500.0;
  CHECK_THROWS_AS(p.evaluate(bad), InvalidArgument);
  bad[0] = std::nan("");
  CHECK_THROWS_AS(p.evaluate(bad), InvalidArgument);
  CHECK_THROWS_AS(p.evaluate(std::vector<double>(7, 0.0)), NotDoubleWell);

  const auto cost = make_cost_I(p);
  CHECK(std::isnan(cost(std::vector<double>(7, 0.0))));
  CHECK(cost(v) == doctest::Approx(cost_config_I(a->observables)));
}

TEST_CASE("separable sweep closes the gap") {
  const Pipeline p = small_pipeline(0.0);
  const auto vi = testsupport::config_i_voltages();
  const auto viii = testsupport::config_iii_voltages();
  // without the repulsion the bare detuning changes sign near lambda = -0.3
  const auto lambdas = lambda_grid(-1.0, 0.5, 13);
  auto records = sweep(p, vi, viii, lambdas, 2);
  REQUIRE(records.size() >= 13);
  for (std::size_t k = 1; k < records.size(); ++k) CHECK(records[k].lambda > records[k - 1].lambda);
  for (const auto& r : records) {
    REQUIRE(r.ok);
    for (double s : r.observables.entropies) CHECK(s < 1e-8);
  }
  std::vector<double> ls;
  const auto gaps = first_gap(records, &ls);
  const auto k = static_cast<std::size_t>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
  REQUIRE(k > 0);
  REQUIRE(k + 1 < gaps.size());
  const GapMinimum m = refine_gap_minimum(p, vi, viii, ls[k - 1], ls[k + 1]);
  CHECK(m.g < 1e-3);
  CHECK(m.record.ok);

  annotate_effective_zeta(records, 0.0);
  for (const auto& r : records) CHECK(r.zeta_eff == 0.0);
  CHECK_THROWS_AS(sweep(p, vi, viii, std::vector<double>{1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(refine_gap_minimum(p, vi, viii, 0.5, 0.5), InvalidArgument);
}

TEST_CASE("sweep records failures and keeps going") {
  const Pipeline p = small_pipeline();
  const auto vi = testsupport::config_i_voltages();
  const std::vector<double> flat(7, 0.0);
  const auto records = sweep(p, vi, flat, std::vector<double>{0.0, 1.0});
  REQUIRE(records.size() == 2);
  CHECK(records[0].ok);
  CHECK_FALSE(records[1].ok);
  CHECK_FALSE(records[1].error.empty());
}
