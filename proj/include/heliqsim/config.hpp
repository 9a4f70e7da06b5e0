#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heliqsim/electrostatics.hpp"
#include "heliqsim/error.hpp"
#include "heliqsim/optimizer.hpp"
#include "heliqsim/pipeline.hpp"

namespace heliqsim {

/// Raised for malformed or out-of-range configuration; the message names
/// the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct SweepSettings {
  double lambda_min = 0.0;
  double lambda_max = 1.0;
  int points = 51;
};

/// Hartree settings used by the command-line tool: defaults plus the
/// subspace-accelerated start.
inline ScfSettings production_scf() {
  ScfSettings s;
  s.subspace = 64;
  return s;
}

struct RunConfig {
  double x0_nm = 123.0;
  std::optional<double> kappa_override;
  DeviceGeometry geometry;
  Eigen::Index points_per_well = 400;
  ScfSettings scf = production_scf();
  double epsilon = 1e-2;
  double kappa_scale = 1.0;
  OptimizerConfig optimizer;
  double cost_tol_config_III = 0.03;
  int restarts = 0;
  double restart_radius_mv = 20.0;
  std::uint64_t rng_seed = 12345;
  ConfigITargets targets_I;
  ConfigIIITargets targets_III;
  SweepSettings sweep;
  std::filesystem::path output_dir = "heliqsim_out";
  std::filesystem::path cache_dir = "heliqsim_cache";

  UnitSystem units() const;
  PipelineSettings pipeline_settings() const;
  /// Digest of the canonical JSON form; stamped into every output.
  std::string hash() const;
  void validate() const;
};

/// Unknown keys and wrong types are rejected with a ConfigError naming the
/// JSON path. Missing keys keep their defaults.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& file);
std::string config_to_json(const RunConfig& config);

/// Voltage file: CSV whose first column labels the electrode (V1..V7) and
/// whose remaining columns hold voltages in mV. `column` selects a column by
/// header name; empty picks the first value column, as does a missing
/// column when `fallback_to_first` is set.
std::vector<double> read_voltages(const std::filesystem::path& file,
                                  const std::string& column = "",
                                  bool fallback_to_first = false);

/// Hand-tuned starting point for the configuration I search (mV), placed
/// in the large-separation double-well basin of the default device.
std::vector<double> default_seed_voltages();

}  // namespace heliqsim
