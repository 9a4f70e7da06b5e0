// heliqsim: two-electron motional spectra and entanglement in a helium
// microchannel trap.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "heliqsim/commands.hpp"

using namespace heliqsim;

namespace {

struct Common {
  std::string config_file;
  std::optional<double> kappa_scale;
  int jobs = 1;
  std::string output_dir;
};

RunConfig load(const Common& c) {
  RunConfig cfg = c.config_file.empty() ? RunConfig{} : load_config(c.config_file);
  if (c.kappa_scale) cfg.kappa_scale = *c.kappa_scale;
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  cfg.optimizer.jobs = c.jobs;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_file, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--kappa-scale", c.kappa_scale, "Scale the Coulomb strength (0 = non-interacting)");
  app->add_option("--jobs", c.jobs, "Worker threads for sweeps and gradients")
      ->check(CLI::PositiveNumber);
  app->add_option("--output-dir", c.output_dir, "Override output_dir from the config");
}

void print_observables(const SpectralObservables& o) {
  std::printf("omega_L %.4f GHz  omega_R %.4f GHz  beta_L %.4f GHz  beta_R %.4f GHz\n",
              o.omega_left, o.omega_right, o.beta_left, o.beta_right);
  std::printf("detuning %.4f GHz  zeta %.6f GHz\n", o.detuning, o.zeta);
  for (std::size_t n = 0; n < std::min<std::size_t>(6, o.energies.size()); ++n) {
    std::printf("  E%zu %10.4f GHz  S%zu %.4f\n", n, o.energies[n], n, o.entropies[n]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-electron spectra, entanglement and voltage search for a helium microchannel trap"};
  app.require_subcommand(1);

  Common common;
  auto* laplace = app.add_subcommand("solve-laplace", "Compute the electrode coupling constants");
  add_common(laplace, common);

  std::string volts, column;
  auto* spectrum = app.add_subcommand("spectrum", "Evaluate one voltage configuration");
  add_common(spectrum, common);
  spectrum->add_option("--voltages", volts, "Voltage CSV (electrode,<mV columns>)")
      ->required()
      ->check(CLI::ExistingFile);
  spectrum->add_option("--column", column, "Voltage column to use (default: first)");

  std::string target, seed_file, seed_column;
  auto* optimize = app.add_subcommand("optimize", "Search voltages for configuration I or III");
  add_common(optimize, common);
  optimize->add_option("--target", target, "I or III")
      ->required()
      ->check(CLI::IsMember({"I", "III"}));
  optimize->add_option("--seed-voltages", seed_file, "Starting voltages (default: shipped seed)")
      ->check(CLI::ExistingFile);
  optimize->add_option("--column", seed_column, "Column of the seed file");

  std::string vi_file, viii_file, lambda_spec;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep lambda between configurations I and III");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--vi", vi_file, "Configuration I voltages")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--viii", viii_file, "Configuration III voltages")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--lambda", lambda_spec, "lo:hi:n (default from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig cfg = load(common);
    std::printf("config hash %s\n", cfg.hash().c_str());

    if (*laplace) {
      const LaplaceOutcome out = cmd_solve_laplace(cfg);
      std::printf("%s\n", out.cache_hit ? "cache hit" : "solved");
      std::printf("geometry %s  electrodes %d  samples %zu\n", out.table->geometry_hash.c_str(),
                  out.table->n_electrodes(), out.table->size());
      std::printf("solver residual %.3e\n", out.table->solver_residual);
      std::printf("partition-of-unity residual %.3e\n", out.table->partition_error());
      return kExitOk;
    }
    if (*spectrum) {
      const PipelineResult r = cmd_spectrum(cfg, read_voltages(volts, column));
      std::printf("Hartree iterations %d\n", r.basis.iterations);
      print_observables(r.observables);
      return kExitOk;
    }
    if (*optimize) {
      const std::vector<double> seed =
          seed_file.empty() ? default_seed_voltages() : read_voltages(seed_file, seed_column);
      const OptimizeOutcome out =
          cmd_optimize(cfg, target == "I" ? Target::I : Target::III, seed);
      std::printf("%s after %zu iterations, best cost %.6g\n", out.adam.message.c_str(),
                  out.adam.history.size(), out.adam.best_cost);
      std::printf("voltages (mV):");
      for (double v : out.adam.best) std::printf(" %.4f", v);
      std::printf("\n");
      print_observables(out.observables);
      if (!out.reached) {
        std::fprintf(stderr, "cost tolerance not reached; best-seen result written\n");
        return kExitShortfall;
      }
      return kExitOk;
    }
    if (*sweep_cmd) {
      const std::vector<double> lambdas =
          lambda_spec.empty()
              ? lambda_grid(cfg.sweep.lambda_min, cfg.sweep.lambda_max,
                            static_cast<std::size_t>(cfg.sweep.points))
              : parse_lambda_range(lambda_spec);
      const SweepOutcome out =
          cmd_sweep(cfg, read_voltages(vi_file, "I", true),
                    read_voltages(viii_file, "III", true), lambdas);
      std::printf("%zu points written\n", out.records.size());
      if (out.have_gap) {
        const auto& o = out.refined.record.observables;
        std::printf("gap minimum at lambda %.6f: g %.4f GHz, S1 %.4f, S2 %.4f\n",
                    out.refined.lambda, out.refined.g, o.entropies[1], o.entropies[2]);
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ElectrostaticsError& e) {
    std::fprintf(stderr, "electrostatics error: %s\n", e.what());
    return kExitElectrostatics;
  } catch (const NotDoubleWell& e) {
    std::fprintf(stderr, "not a double well: %s\n", e.what());
    return kExitInvalidWell;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitInvalidWell;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
