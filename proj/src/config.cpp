#include "heliqsim/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "heliqsim/hash.hpp"

namespace heliqsim {

using nlohmann::json;

namespace {

// Reads fields out of one JSON object, remembering which keys were used so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError(where(key) + ": expected true/false");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!it->is_number()) throw ConfigError(where(key) + ": expected a number");
        if constexpr (std::is_integral_v<T>) {
          const double d = it->template get<double>();
          if (d != std::floor(d)) throw ConfigError(where(key) + ": expected an integer");
        }
      } else {
        if (!it->is_string()) throw ConfigError(where(key) + ": expected a string");
      }
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  Section sub(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    auto it = j_.find(key);
    return Section(it == j_.end() ? empty : *it, where(key));
  }

  const json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

UnitSystem RunConfig::units() const {
  UnitSystem u = derive_units(x0_nm);
  if (kappa_override) u.kappa = *kappa_override;
  return u;
}

PipelineSettings RunConfig::pipeline_settings() const {
  PipelineSettings s;
  s.units = units();
  s.points_per_well = points_per_well;
  s.scf = scf;
  s.epsilon = epsilon;
  s.kappa_scale = kappa_scale;
  return s;
}

std::string RunConfig::hash() const { return Fnv1a().add(config_to_json(*this)).hex(); }

void RunConfig::validate() const {
  require(std::isfinite(x0_nm) && x0_nm > 0.0, "x0_nm", "must be positive");
  if (kappa_override) require(*kappa_override >= 0.0, "kappa_override", "must be >= 0");
  try {
    geometry.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  require(points_per_well >= 10, "dvr.points_per_well", "must be at least 10");
  require(scf.n_left >= 2 && scf.n_right >= 2, "hartree.n_left/n_right",
          "need at least 3 orbitals per well");
  require(scf.n_left < points_per_well && scf.n_right < points_per_well,
          "hartree.n_left/n_right", "exceeds the grid size");
  require(scf.tol > 0.0, "hartree.tol", "must be positive");
  require(scf.max_iter >= 1, "hartree.max_iter", "must be positive");
  require(scf.subspace >= 0, "hartree.subspace", "must be >= 0");
  require(epsilon > 0.0, "interaction.epsilon", "must be positive");
  require(kappa_scale >= 0.0, "interaction.kappa_scale", "must be >= 0");
  require(optimizer.learning_rate_mv > 0.0, "optimizer.learning_rate_mv", "must be positive");
  require(optimizer.fd_step_mv > 0.0, "optimizer.fd_step_mv", "must be positive");
  require(optimizer.max_iters >= 0, "optimizer.max_iters", "must be >= 0");
  require(optimizer.adam_beta1 >= 0.0 && optimizer.adam_beta1 < 1.0, "optimizer.adam_beta1",
          "must lie in [0, 1)");
  require(optimizer.adam_beta2 >= 0.0 && optimizer.adam_beta2 < 1.0, "optimizer.adam_beta2",
          "must lie in [0, 1)");
  require(optimizer.jobs >= 1, "jobs", "must be positive");
  require(restarts >= 0, "optimizer.restarts", "must be >= 0");
  require(sweep.points >= 1, "sweep.points", "must be positive");
  require(sweep.lambda_max >= sweep.lambda_min, "sweep.lambda_max", "must be >= lambda_min");
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["x0_nm"] = c.x0_nm;
  j["kappa_override"] = c.kappa_override ? json(*c.kappa_override) : json(nullptr);
  const auto& g = c.geometry;
  j["geometry"] = {{"channel_width_um", g.channel_width_um},
                   {"channel_depth_um", g.channel_depth_um},
                   {"electrode_width_nm", g.electrode_width_nm},
                   {"electrode_gap_nm", g.electrode_gap_nm},
                   {"n_electrodes", g.n_electrodes},
                   {"grid_spacing_nm", g.grid_spacing_nm},
                   {"vacuum_height_um", g.vacuum_height_um},
                   {"ground_plane_extent_um", g.ground_plane_extent_um}};
  j["dvr"] = {{"points_per_well", c.points_per_well}};
  j["hartree"] = {{"n_left", c.scf.n_left},
                  {"n_right", c.scf.n_right},
                  {"tol", c.scf.tol},
                  {"max_iter", c.scf.max_iter},
                  {"subspace", c.scf.subspace}};
  j["interaction"] = {{"epsilon", c.epsilon}, {"kappa_scale", c.kappa_scale}};
  const auto& o = c.optimizer;
  j["optimizer"] = {{"learning_rate_mv", o.learning_rate_mv},
                    {"adam_beta1", o.adam_beta1},
                    {"adam_beta2", o.adam_beta2},
                    {"adam_eps", o.adam_eps},
                    {"max_iters", o.max_iters},
                    {"cost_tol", o.cost_tol},
                    {"cost_tol_config_III", c.cost_tol_config_III},
                    {"fd_step_mv", o.fd_step_mv},
                    {"plateau_patience", o.plateau_patience},
                    {"lr_decay", o.lr_decay},
                    {"min_learning_rate_mv", o.min_learning_rate_mv},
                    {"restarts", c.restarts},
                    {"restart_radius_mv", c.restart_radius_mv},
                    {"rng_seed", c.rng_seed}};
  const auto& t1 = c.targets_I;
  const auto& t3 = c.targets_III;
  j["targets"] = {{"config_I",
                   {{"omega_left_ghz", t1.omega_left},
                    {"omega_right_ghz", t1.omega_right},
                    {"beta_left_ghz", t1.beta_left},
                    {"beta_right_ghz", t1.beta_right}}},
                  {"config_III",
                   {{"s3", t3.s3},
                    {"s4", t3.s4},
                    {"s5", t3.s5},
                    {"beta_left_ghz", t3.beta_left},
                    {"beta_right_ghz", t3.beta_right},
                    {"detuning_ghz", t3.detuning}}}};
  j["sweep"] = {{"lambda_min", c.sweep.lambda_min},
                {"lambda_max", c.sweep.lambda_max},
                {"points", c.sweep.points}};
  j["output_dir"] = c.output_dir.string();
  j["cache_dir"] = c.cache_dir.string();
  return j.dump(2);
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section root(j, "");
  root.get("x0_nm", c.x0_nm);
  if (const json* k = root.raw("kappa_override"); k && !k->is_null()) {
    if (!k->is_number()) throw ConfigError("kappa_override: expected a number or null");
    c.kappa_override = k->get<double>();
  }
  {
    Section s = root.sub("geometry");
    auto& g = c.geometry;
    s.get("channel_width_um", g.channel_width_um);
    s.get("channel_depth_um", g.channel_depth_um);
    s.get("electrode_width_nm", g.electrode_width_nm);
    s.get("electrode_gap_nm", g.electrode_gap_nm);
    s.get("n_electrodes", g.n_electrodes);
    s.get("grid_spacing_nm", g.grid_spacing_nm);
    s.get("vacuum_height_um", g.vacuum_height_um);
    s.get("ground_plane_extent_um", g.ground_plane_extent_um);
    s.finish();
  }
  {
    Section s = root.sub("dvr");
    long k = static_cast<long>(c.points_per_well);
    s.get("points_per_well", k);
    c.points_per_well = k;
    s.finish();
  }
  {
    Section s = root.sub("hartree");
    long nl = static_cast<long>(c.scf.n_left);
    long nr = static_cast<long>(c.scf.n_right);
    s.get("n_left", nl);
    s.get("n_right", nr);
    c.scf.n_left = nl;
    c.scf.n_right = nr;
    s.get("tol", c.scf.tol);
    s.get("max_iter", c.scf.max_iter);
    long sub = static_cast<long>(c.scf.subspace);
    s.get("subspace", sub);
    c.scf.subspace = sub;
    s.finish();
  }
  {
    Section s = root.sub("interaction");
    s.get("epsilon", c.epsilon);
    s.get("kappa_scale", c.kappa_scale);
    s.finish();
  }
  {
    Section s = root.sub("optimizer");
    auto& o = c.optimizer;
    s.get("learning_rate_mv", o.learning_rate_mv);
    s.get("adam_beta1", o.adam_beta1);
    s.get("adam_beta2", o.adam_beta2);
    s.get("adam_eps", o.adam_eps);
    s.get("max_iters", o.max_iters);
    s.get("cost_tol", o.cost_tol);
    s.get("cost_tol_config_III", c.cost_tol_config_III);
    s.get("fd_step_mv", o.fd_step_mv);
    s.get("plateau_patience", o.plateau_patience);
    s.get("lr_decay", o.lr_decay);
    s.get("min_learning_rate_mv", o.min_learning_rate_mv);
    s.get("restarts", c.restarts);
    s.get("restart_radius_mv", c.restart_radius_mv);
    s.get("rng_seed", c.rng_seed);
    s.finish();
  }
  {
    Section t = root.sub("targets");
    Section a = t.sub("config_I");
    a.get("omega_left_ghz", c.targets_I.omega_left);
    a.get("omega_right_ghz", c.targets_I.omega_right);
    a.get("beta_left_ghz", c.targets_I.beta_left);
    a.get("beta_right_ghz", c.targets_I.beta_right);
    a.finish();
    Section b = t.sub("config_III");
    b.get("s3", c.targets_III.s3);
    b.get("s4", c.targets_III.s4);
    b.get("s5", c.targets_III.s5);
    b.get("beta_left_ghz", c.targets_III.beta_left);
    b.get("beta_right_ghz", c.targets_III.beta_right);
    b.get("detuning_ghz", c.targets_III.detuning);
    b.finish();
    t.finish();
  }
  {
    Section s = root.sub("sweep");
    s.get("lambda_min", c.sweep.lambda_min);
    s.get("lambda_max", c.sweep.lambda_max);
    s.get("points", c.sweep.points);
    s.finish();
  }
  std::string out = c.output_dir.string();
  std::string cache = c.cache_dir.string();
  root.get("output_dir", out);
  root.get("cache_dir", cache);
  c.output_dir = out;
  c.cache_dir = cache;
  root.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<double> read_voltages(const std::filesystem::path& file, const std::string& column,
                                  bool fallback_to_first) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open voltage file " + file.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split(line);
    break;
  }
  if (header.size() < 2) throw ConfigError(file.string() + ": expected a header with a value column");
  std::size_t col = 1;
  if (!column.empty()) {
    auto it = std::find(header.begin() + 1, header.end(), column);
    if (it != header.end()) {
      col = static_cast<std::size_t>(it - header.begin());
    } else if (!fallback_to_first) {
      throw ConfigError(file.string() + ": no column named " + column);
    }
  }
  std::vector<double> v;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (cells.size() <= col) throw ConfigError(file.string() + ": short row '" + line + "'");
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cells[col], &used));
      if (used != cells[col].size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ConfigError(file.string() + ": not a number in row '" + line + "'");
    }
  }
  return v;
}

std::vector<double> default_seed_voltages() {
  return {230.0, -30.0, 420.0, -660.0, 290.0, -40.0, 80.0};
}

}  // namespace heliqsim
