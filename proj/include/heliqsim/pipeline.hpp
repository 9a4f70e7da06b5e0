#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "heliqsim/analysis.hpp"
#include "heliqsim/ci.hpp"
#include "heliqsim/dvr.hpp"
#include "heliqsim/electrostatics.hpp"
#include "heliqsim/hartree.hpp"
#include "heliqsim/units.hpp"

namespace heliqsim {

struct PipelineSettings {
  UnitSystem units;
  Eigen::Index points_per_well = 400;
  ScfSettings scf;
  double epsilon = 1e-2;
  double kappa_scale = 1.0;

  double kappa() const { return units.kappa * kappa_scale; }
};

/// Everything downstream of one voltage vector. The large DVR operators are
/// not kept; rebuild them from `profile` and the grids when needed.
struct PipelineResult {
  std::vector<double> voltages_mv;
  PotentialProfile profile;
  Barrier barrier;
  DvrGrid left;
  DvrGrid right;
  HartreeBasis basis;
  double hartree_energy = 0.0;
  TwoBodySpectrum spectrum;
  SpectralObservables observables;
};

/// Composes electrostatics, DVR, Hartree, CI and analysis for a fixed
/// coupling table. Results are cached by a hash of the voltages; all
/// methods are safe to call from several threads.
class Pipeline {
 public:
  Pipeline(std::shared_ptr<const CouplingTable> table, PipelineSettings settings);

  /// Throws NotDoubleWell for voltages without a double well and
  /// SolverError when the SCF loop does not converge.
  std::shared_ptr<const PipelineResult> evaluate(std::span<const double> voltages_mv) const;

  const PipelineSettings& settings() const { return settings_; }
  const CouplingTable& table() const { return *table_; }
  std::size_t evaluations() const;
  std::size_t cache_hits() const;

 private:
  std::shared_ptr<const CouplingTable> table_;
  PipelineSettings settings_;
  mutable std::mutex mutex_;
  mutable std::map<std::uint64_t, std::shared_ptr<const PipelineResult>> cache_;
  mutable std::size_t evaluations_ = 0;
  mutable std::size_t hits_ = 0;
};

/// Uncached evaluation of a single configuration.
PipelineResult pipeline_evaluate(const CouplingTable& table, std::span<const double> voltages_mv,
                                 const PipelineSettings& settings);

}  // namespace heliqsim
