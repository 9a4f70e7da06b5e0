#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heliqsim/config.hpp"

namespace heliqsim {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitElectrostatics = 2,
  kExitInvalidWell = 3,
  kExitShortfall = 4,
};

/// Raised when the Laplace solve fails; maps to kExitElectrostatics.
class ElectrostaticsError : public Error {
 public:
  using Error::Error;
};

struct LaplaceOutcome {
  std::shared_ptr<const CouplingTable> table;
  bool cache_hit = false;
};

/// Loads or solves the coupling table and writes `coupling.csv` and
/// `coupling.json` into the output directory.
LaplaceOutcome cmd_solve_laplace(const RunConfig& config);

/// Coupling table only, without writing outputs.
std::shared_ptr<const CouplingTable> coupling_for(const RunConfig& config);

/// Writes spectrum.json, orbitals_left.csv, orbitals_right.csv,
/// density.csv and pair_density.csv.
PipelineResult cmd_spectrum(const RunConfig& config, const std::vector<double>& voltages_mv);

enum class Target { I, III };

struct OptimizeOutcome {
  AdamResult adam;
  SpectralObservables observables;
  bool reached = false;
};

/// Runs the configuration search and writes optimize_<target>.jsonl,
/// voltages_<target>.csv and optimize_<target>.json.
OptimizeOutcome cmd_optimize(const RunConfig& config, Target target,
                             const std::vector<double>& seed_mv);

struct SweepOutcome {
  std::vector<SweepRecord> records;
  bool have_gap = false;
  GapCoupling coarse;     // parabola on the sweep grid
  GapMinimum refined;     // Brent refinement on the pipeline
};

/// Sweeps V(lambda) and writes sweep.csv, zeta.csv, sweep.json and
/// voltage_table.csv.
SweepOutcome cmd_sweep(const RunConfig& config, const std::vector<double>& v_i,
                       const std::vector<double>& v_iii, const std::vector<double>& lambdas);

/// "lo:hi:n" -> n evenly spaced values.
std::vector<double> parse_lambda_range(const std::string& spec);

}  // namespace heliqsim
