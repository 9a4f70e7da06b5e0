#include "support.hpp"

#include <mutex>

namespace testsupport {

DvrGrid uniform_grid(double x0, double dx, Eigen::Index n, Well well) {
  DvrGrid g;
  g.dx = dx;
  g.well = well;
  for (Eigen::Index k = 0; k < n; ++k) g.x.push_back(x0 + dx * static_cast<double>(k));
  return g;
}

SplitSystem split_system(const std::function<double(double)>& v, double x_b, double dx,
                         Eigen::Index n_left, Eigen::Index n_right) {
  SplitSystem s;
  s.left = uniform_grid(x_b - dx * static_cast<double>(n_left), dx, n_left, Well::Left);
  s.right = uniform_grid(x_b, dx, n_right, Well::Right);
  s.profile.x = s.left.x;
  s.profile.x.insert(s.profile.x.end(), s.right.x.begin(), s.right.x.end());
  for (double x : s.profile.x) s.profile.v.push_back(v(x));
  return s;
}

heliqsim::RunConfig test_config() {
  heliqsim::RunConfig c;
  c.cache_dir = HELIQSIM_TEST_CACHE;
  c.output_dir = HELIQSIM_TEST_OUTPUT;
  return c;
}

std::shared_ptr<const heliqsim::CouplingTable> default_table() {
  static std::once_flag once;
  static std::shared_ptr<const heliqsim::CouplingTable> table;
  std::call_once(once, [] {
    const auto c = test_config();
    table = std::make_shared<const heliqsim::CouplingTable>(
        heliqsim::load_or_solve_coupling(c.geometry, c.units(), c.cache_dir));
  });
  return table;
}

std::vector<double> config_i_voltages() {
  return {233.38, -27.51, 418.96, -655.56, 288.55, -36.56, 84.29};
}

std::vector<double> config_iii_voltages() {
  return {233.647, -25.629, 420.091, -659.662, 293.559, -34.720, 86.868};
}

}  // namespace testsupport
