#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "heliqsim/units.hpp"

namespace heliqsim {

/// Cross-section of the microchannel device along the quantization axis.
///
/// The channel of width `channel_width_um` and depth `channel_depth_um` is
/// bounded by grounded metal side walls. Electrodes sit on the channel floor,
/// centred and evenly pitched. Above the channel opening the domain continues
/// into vacuum: a grounded top plane extends `ground_plane_extent_um` beyond
/// each wall at the level of the opening, and the outer box
/// (`vacuum_height_um` above the opening) is grounded as well. Floor gaps
/// between conductors carry a linearly interpolated potential.
struct DeviceGeometry {
  double channel_width_um = 3.0;
  double channel_depth_um = 0.5;
  double electrode_width_nm = 200.0;
  double electrode_gap_nm = 200.0;
  int n_electrodes = 7;
  double grid_spacing_nm = 5.0;
  double vacuum_height_um = 1.0;
  double ground_plane_extent_um = 1.0;

  /// Throws InvalidArgument on degenerate or overfull layouts.
  void validate() const;
  /// Stable hex digest of every field (plus the length unit, since the
  /// exported table is in units of x0).
  std::string hash(double x0_nm) const;
};

/// Coupling constants alpha_i(x) sampled along the channel opening.
struct CouplingTable {
  std::vector<double> x;        // dimensionless positions, uniform
  Eigen::MatrixXd alpha;        // [n_electrodes x n_samples]
  Eigen::VectorXd alpha_ground; // response to all grounded surfaces at 1
  double solver_residual = 0.0; // max-norm residual of the Laplace solve
  double grid_spacing_nm = 0.0;
  std::string geometry_hash;

  int n_electrodes() const { return static_cast<int>(alpha.rows()); }
  std::size_t size() const { return x.size(); }
  /// max_x |sum_i alpha_i(x) + alpha_ground(x) - 1|
  double partition_error() const;
};

CouplingTable solve_coupling_constants(const DeviceGeometry& geometry,
                                       const UnitSystem& units);

/// CSV with header `x,alpha_1..alpha_N,alpha_ground`, 15 significant digits.
void write_coupling_csv(std::ostream& out, const CouplingTable& table);
CouplingTable read_coupling_csv(std::istream& in);

/// Loads `coupling_<hash>.csv` from `cache_dir` when present, otherwise
/// solves and stores it there. `cache_hit` reports which path was taken.
CouplingTable load_or_solve_coupling(const DeviceGeometry& geometry,
                                     const UnitSystem& units,
                                     const std::filesystem::path& cache_dir,
                                     bool* cache_hit = nullptr);

/// Dimensionless trap potential v(x) = -e phi(x) / E_d on a uniform grid.
struct PotentialProfile {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> voltages_mv;

  std::size_t size() const { return x.size(); }
  double spacing() const { return x[1] - x[0]; }
  double x_min() const { return x.front(); }
  double x_max() const { return x.back(); }
};

PotentialProfile assemble_potential(const CouplingTable& table,
                                    std::span<const double> voltages_mv,
                                    const UnitSystem& units);

/// Builds a profile from an analytic potential, mainly for tests and
/// oracles. Samples are uniform on [x_lo, x_hi].
template <class F>
PotentialProfile sample_potential(F&& v, double x_lo, double x_hi,
                                  std::size_t n) {
  PotentialProfile p;
  p.x.resize(n);
  p.v.resize(n);
  const double h = (x_hi - x_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    p.x[i] = x_lo + h * static_cast<double>(i);
    p.v[i] = v(p.x[i]);
  }
  return p;
}

/// Piecewise-linear interpolation; throws RangeError outside the samples.
double interpolate_potential(const PotentialProfile& profile, double x);

struct Barrier {
  double x_b = 0.0;
  double v_b = 0.0;
  double x_min_left = 0.0;
  double x_min_right = 0.0;
  double v_min_left = 0.0;
  double v_min_right = 0.0;
};

/// Locates the two minima and the single interior maximum between them.
/// Positions are refined with a three-point parabola so they move
/// continuously with the voltages. Throws NotDoubleWell otherwise.
Barrier find_barrier(const PotentialProfile& profile);

}  // namespace heliqsim
