#include "heliqsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "heliqsim/effective.hpp"

namespace heliqsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json provenance(const RunConfig& c) {
  return {{"config_hash", c.hash()}, {"created", timestamp()}};
}

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  std::ofstream out(c.output_dir / name);
  if (!out) throw ConfigError("output_dir: cannot write " + (c.output_dir / name).string());
  return out;
}

std::ofstream open_csv(const RunConfig& c, const std::string& name) {
  std::ofstream out = open_output(c, name);
  out << "# config_hash=" << c.hash() << '\n';
  return out;
}

void write_json(const RunConfig& c, const std::string& name, const json& j) {
  std::ofstream out = open_output(c, name);
  out << j.dump(2) << '\n';
}

json observables_json(const SpectralObservables& o) {
  return {{"omega_left_ghz", o.omega_left}, {"omega_right_ghz", o.omega_right},
          {"beta_left_ghz", o.beta_left},   {"beta_right_ghz", o.beta_right},
          {"detuning_ghz", o.detuning},     {"zeta_ghz", o.zeta},
          {"energies_ghz", o.energies},     {"entropies_bits", o.entropies}};
}

void write_voltage_table(const RunConfig& c, const std::string& name,
                         const std::vector<std::pair<std::string, std::vector<double>>>& cols) {
  std::ofstream out = open_csv(c, name);
  out << "electrode";
  for (const auto& [label, v] : cols) out << ',' << label;
  out << '\n';
  const std::size_t n = cols.empty() ? 0 : cols.front().second.size();
  for (std::size_t i = 0; i < n; ++i) {
    out << 'V' << i + 1;
    for (const auto& col : cols) out << ',' << num(col.second[i]);
    out << '\n';
  }
}

}  // namespace

std::shared_ptr<const CouplingTable> coupling_for(const RunConfig& config) {
  return cmd_solve_laplace(config).table;
}

LaplaceOutcome cmd_solve_laplace(const RunConfig& config) {
  LaplaceOutcome out;
  try {
    out.table = std::make_shared<const CouplingTable>(load_or_solve_coupling(
        config.geometry, config.units(), config.cache_dir, &out.cache_hit));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  } catch (const Error& e) {
    throw ElectrostaticsError(e.what());
  }
  const CouplingTable& t = *out.table;
  if (!(t.partition_error() < 1e-8)) {
    throw ElectrostaticsError("partition of unity violated: " + num(t.partition_error()));
  }
  {
    std::ofstream csv = open_csv(config, "coupling.csv");
    write_coupling_csv(csv, t);
  }
  json j = {{"provenance", provenance(config)},
            {"geometry_hash", t.geometry_hash},
            {"solver_residual", t.solver_residual},
            {"grid_spacing_nm", t.grid_spacing_nm},
            {"partition_error", t.partition_error()},
            {"samples", t.size()},
            {"electrodes", t.n_electrodes()},
            {"x0_nm", config.x0_nm},
            {"cache_hit", out.cache_hit}};
  write_json(config, "coupling.json", j);
  return out;
}

PipelineResult cmd_spectrum(const RunConfig& config, const std::vector<double>& voltages_mv) {
  const auto table = coupling_for(config);
  const PipelineSettings settings = config.pipeline_settings();
  PipelineResult r = pipeline_evaluate(*table, voltages_mv, settings);

  json coeffs = json::array();
  json labels = json::array();
  const auto product = product_labels(r.spectrum, r.spectrum.size());
  for (Eigen::Index n = 0; n < r.spectrum.size(); ++n) {
    const Eigen::MatrixXd c = r.spectrum.coefficients(n);
    json rows = json::array();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < c.cols(); ++j) row.push_back(c(i, j));
      rows.push_back(std::move(row));
    }
    coeffs.push_back(rows);
    const auto [i, j] = product[static_cast<std::size_t>(n)];
    labels.push_back(std::to_string(i) + std::to_string(j));
  }
  auto ghz_list = [&](const Eigen::VectorXd& e) {
    std::vector<double> out;
    for (Eigen::Index k = 0; k < e.size(); ++k) out.push_back(energy_to_ghz(e(k), settings.units));
    return out;
  };
  json j = {{"provenance", provenance(config)},
            {"voltages_mv", voltages_mv},
            {"kappa", settings.kappa()},
            {"kappa_scale", settings.kappa_scale},
            {"barrier",
             {{"x_b", r.barrier.x_b},
              {"x_min_left", r.barrier.x_min_left},
              {"x_min_right", r.barrier.x_min_right}}},
            {"grid", {{"points_per_well", r.left.size()}, {"dx", r.left.dx}}},
            {"hartree",
             {{"eps_left_ghz", ghz_list(r.basis.eps_left)},
              {"eps_right_ghz", ghz_list(r.basis.eps_right)},
              {"iterations", r.basis.iterations},
              {"converged", r.basis.converged},
              {"mixing_used", r.basis.mixing_used}}},
            {"observables", observables_json(r.observables)},
            {"product_labels", labels},
            {"coefficients", coeffs}};
  write_json(config, "spectrum.json", j);

  auto write_orbitals = [&](const std::string& name, const Eigen::MatrixXd& b,
                            const DvrGrid& g) {
    const Eigen::MatrixXd d = orbital_densities(b, g);
    std::ofstream out = open_csv(config, name);
    out << 'x';
    for (Eigen::Index i = 0; i < d.cols(); ++i) out << ",phi" << i << "_sq";
    out << '\n';
    for (Eigen::Index a = 0; a < d.rows(); ++a) {
      out << num(g.x[static_cast<std::size_t>(a)]);
      for (Eigen::Index i = 0; i < d.cols(); ++i) out << ',' << num(d(a, i));
      out << '\n';
    }
  };
  write_orbitals("orbitals_left.csv", r.basis.left, r.left);
  write_orbitals("orbitals_right.csv", r.basis.right, r.right);

  const Eigen::Index shown = std::min<Eigen::Index>(6, r.spectrum.size());
  {
    std::vector<Density> dens;
    for (Eigen::Index n = 0; n < shown; ++n) {
      dens.push_back(particle_density(r.spectrum.coefficients(n), r.basis, r.left, r.right));
    }
    std::ofstream out = open_csv(config, "density.csv");
    out << 'x';
    for (Eigen::Index n = 0; n < shown; ++n) out << ",rho" << n;
    out << '\n';
    for (std::size_t k = 0; k < dens.front().x.size(); ++k) {
      out << num(dens.front().x[k]);
      for (const auto& d : dens) out << ',' << num(d.rho[k]);
      out << '\n';
    }
  }
  {
    // Pair densities on a thinned grid keep the file plot-sized.
    const Eigen::Index stride_l = std::max<Eigen::Index>(1, r.left.size() / 100);
    const Eigen::Index stride_r = std::max<Eigen::Index>(1, r.right.size() / 100);
    std::ofstream out = open_csv(config, "pair_density.csv");
    out << "state,x1,x2,rho\n";
    for (Eigen::Index n = 0; n < shown; ++n) {
      const Eigen::MatrixXd p =
          pair_density(r.spectrum.coefficients(n), r.basis, r.left, r.right);
      for (Eigen::Index a = 0; a < p.rows(); a += stride_l) {
        for (Eigen::Index b = 0; b < p.cols(); b += stride_r) {
          out << n << ',' << num(r.left.x[static_cast<std::size_t>(a)]) << ','
              << num(r.right.x[static_cast<std::size_t>(b)]) << ',' << num(p(a, b)) << '\n';
        }
      }
    }
  }
  return r;
}

OptimizeOutcome cmd_optimize(const RunConfig& config, Target target,
                             const std::vector<double>& seed_mv) {
  const auto table = coupling_for(config);
  if (static_cast<int>(seed_mv.size()) != table->n_electrodes()) {
    throw ConfigError("seed voltages: expected " + std::to_string(table->n_electrodes()) +
                      " values");
  }
  Pipeline pipeline(table, config.pipeline_settings());
  const std::string tag = target == Target::I ? "I" : "III";
  OptimizerConfig oc = config.optimizer;
  CostFunction cost;
  if (target == Target::I) {
    cost = make_cost_I(pipeline, config.targets_I);
  } else {
    cost = make_cost_III(pipeline, config.targets_III);
    oc.cost_tol = config.cost_tol_config_III;
  }
  // The starting point must be a valid double well; report it like any
  // other invalid configuration.
  pipeline.evaluate(seed_mv);

  std::ofstream log = open_output(config, "optimize_" + tag + ".jsonl");
  const std::string hash = config.hash();
  auto on_iter = [&](const AdamRecord& r) {
    json line = {{"iter", r.iter},
                 {"cost", r.cost},
                 {"voltages_mv", r.voltages_mv},
                 {"learning_rate_mv", r.learning_rate_mv},
                 {"config_hash", hash}};
    log << line.dump() << '\n';
    log.flush();
  };
  OptimizeOutcome out;
  out.adam = multi_start(cost, seed_mv, oc, config.restarts, config.restart_radius_mv,
                         config.rng_seed, on_iter);
  out.observables = pipeline.evaluate(out.adam.best)->observables;
  out.reached = out.adam.best_cost < oc.cost_tol;

  write_voltage_table(config, "voltages_" + tag + ".csv", {{tag, out.adam.best}});
  json j = {{"provenance", provenance(config)},
            {"target", tag},
            {"seed_voltages_mv", seed_mv},
            {"voltages_mv", out.adam.best},
            {"cost", out.adam.best_cost},
            {"cost_tol", oc.cost_tol},
            {"reached", out.reached},
            {"iterations", out.adam.history.size()},
            {"message", out.adam.message},
            {"evaluations", pipeline.evaluations()},
            {"observables", observables_json(out.observables)}};
  write_json(config, "optimize_" + tag + ".json", j);
  return out;
}

SweepOutcome cmd_sweep(const RunConfig& config, const std::vector<double>& v_i,
                       const std::vector<double>& v_iii, const std::vector<double>& lambdas) {
  const auto table = coupling_for(config);
  if (static_cast<int>(v_i.size()) != table->n_electrodes() || v_iii.size() != v_i.size()) {
    throw ConfigError("sweep voltages: expected " + std::to_string(table->n_electrodes()) +
                      " values per configuration");
  }
  Pipeline pipeline(table, config.pipeline_settings());
  SweepOutcome out;
  out.records = sweep(pipeline, v_i, v_iii, lambdas, config.optimizer.jobs);

  std::vector<double> ls;
  const std::vector<double> gaps = first_gap(out.records, &ls);
  try {
    out.coarse = extract_gap_coupling(ls, gaps);
    const double lo = ls[out.coarse.index - 1];
    const double hi = ls[out.coarse.index + 1];
    out.refined = refine_gap_minimum(pipeline, v_i, v_iii, lo, hi);
    out.have_gap = out.refined.record.ok;
  } catch (const Error& e) {
    std::cerr << "no interior gap minimum: " << e.what() << '\n';
  }
  if (out.have_gap) annotate_effective_zeta(out.records, out.refined.g);

  {
    std::ofstream csv = open_csv(config, "sweep.csv");
    csv << "lambda";
    for (int n = 1; n <= 5; ++n) csv << ",E" << n << "_ghz";
    for (int n = 1; n <= 5; ++n) csv << ",S" << n;
    csv << ",beta_L,beta_R,detuning,zeta_ghz,zeta_eff_ghz,min_overlap,errors\n";
    for (const auto& r : out.records) {
      csv << num(r.lambda);
      const auto& o = r.observables;
      for (std::size_t n = 1; n <= 5; ++n) csv << ',' << (r.ok ? num(o.energies[n]) : "nan");
      for (std::size_t n = 1; n <= 5; ++n) csv << ',' << (r.ok ? num(o.entropies[n]) : "nan");
      if (r.ok) {
        csv << ',' << num(o.beta_left) << ',' << num(o.beta_right) << ',' << num(o.detuning)
            << ',' << num(o.zeta);
      } else {
        csv << ",nan,nan,nan,nan";
      }
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      csv << ',' << num(r.zeta_eff) << ',' << num(r.min_overlap) << ',' << err << '\n';
    }
  }
  {
    std::ofstream csv = open_csv(config, "zeta.csv");
    csv << "lambda,zeta_ci_ghz,zeta_eff_ghz\n";
    for (const auto& r : out.records) {
      if (!r.ok) continue;
      csv << num(r.lambda) << ',' << num(r.observables.zeta) << ',' << num(r.zeta_eff) << '\n';
    }
  }
  json j = {{"provenance", provenance(config)},
            {"points", out.records.size()},
            {"failed_points",
             std::count_if(out.records.begin(), out.records.end(),
                           [](const SweepRecord& r) { return !r.ok; })}};
  if (out.have_gap) {
    const auto& o = out.refined.record.observables;
    j["config_II"] = {{"lambda_coarse", out.coarse.lambda_star},
                      {"g_coarse_ghz", out.coarse.g},
                      {"lambda_star", out.refined.lambda},
                      {"g_ghz", out.refined.g},
                      {"s1", o.entropies[1]},
                      {"s2", o.entropies[2]},
                      {"voltages_mv", out.refined.record.voltages_mv}};
    write_voltage_table(config, "voltage_table.csv",
                        {{"I", v_i}, {"II", out.refined.record.voltages_mv}, {"III", v_iii}});
  }
  write_json(config, "sweep.json", j);
  return out;
}

std::vector<double> parse_lambda_range(const std::string& spec) {
  std::stringstream ss(spec);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
    throw ConfigError("--lambda: expected lo:hi:n, got '" + spec + "'");
  }
  try {
    const double lo = std::stod(a);
    const double hi = std::stod(b);
    const long n = std::stol(c);
    if (n < 1 || hi < lo) throw std::invalid_argument("range");
    return lambda_grid(lo, hi, static_cast<std::size_t>(n));
  } catch (const std::exception&) {
    throw ConfigError("--lambda: expected lo:hi:n with n >= 1 and hi >= lo, got '" + spec + "'");
  }
}

}  // namespace heliqsim
