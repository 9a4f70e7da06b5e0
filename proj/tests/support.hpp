#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "heliqsim/config.hpp"
#include "heliqsim/dvr.hpp"
#include "heliqsim/electrostatics.hpp"

namespace testsupport {

using heliqsim::DvrGrid;
using heliqsim::PotentialProfile;
using heliqsim::Well;

/// n points x0, x0 + dx, ...
DvrGrid uniform_grid(double x0, double dx, Eigen::Index n, Well well);

/// Left and right grids that meet at x_b, with a profile sampled exactly on
/// their nodes so that interpolation is exact there.
struct SplitSystem {
  DvrGrid left;
  DvrGrid right;
  PotentialProfile profile;
};
SplitSystem split_system(const std::function<double(double)>& v, double x_b, double dx,
                         Eigen::Index n_left, Eigen::Index n_right);

/// Coupling table of the default device, solved once per process and
/// cached on disk under the build tree.
std::shared_ptr<const heliqsim::CouplingTable> default_table();
heliqsim::RunConfig test_config();

/// Double-well voltages in the large-separation basin (mV). `config_i`
/// roughly meets the configuration I targets, `config_iii` roughly meets
/// the configuration III entropies.
std::vector<double> config_i_voltages();
std::vector<double> config_iii_voltages();

}  // namespace testsupport
