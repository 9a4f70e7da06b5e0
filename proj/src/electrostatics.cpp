#include "heliqsim/electrostatics.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "heliqsim/error.hpp"
#include "heliqsim/hash.hpp"

namespace heliqsim {

void DeviceGeometry::validate() const {
  if (n_electrodes < 1) throw InvalidArgument("geometry: need at least one electrode");
  for (double len : {channel_width_um, channel_depth_um, electrode_width_nm,
                     vacuum_height_um, ground_plane_extent_um, grid_spacing_nm}) {
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw InvalidArgument("geometry: lengths must be positive and finite");
    }
  }
  if (!(electrode_gap_nm >= 0.0)) throw InvalidArgument("geometry: negative electrode gap");
  const double footprint = n_electrodes * electrode_width_nm +
                           (n_electrodes - 1) * electrode_gap_nm;
  if (footprint > channel_width_um * 1e3 + 1e-9) {
    throw InvalidArgument("geometry: electrodes do not fit in the channel");
  }
  const double h = grid_spacing_nm;
  for (double len : {channel_width_um * 1e3, channel_depth_um * 1e3,
                     electrode_width_nm}) {
    if (len < 2.0 * h) {
      throw InvalidArgument("geometry: grid spacing too coarse for the device features");
    }
  }
}

std::string DeviceGeometry::hash(double x0_nm) const {
  Fnv1a h;
  h.add("geometry-v1;")
      .add(channel_width_um)
      .add(channel_depth_um)
      .add(electrode_width_nm)
      .add(electrode_gap_nm)
      .add(static_cast<double>(n_electrodes))
      .add(grid_spacing_nm)
      .add(vacuum_height_um)
      .add(ground_plane_extent_um)
      .add(x0_nm);
  return h.hex();
}

double CouplingTable::partition_error() const {
  double worst = 0.0;
  for (Eigen::Index s = 0; s < alpha.cols(); ++s) {
    const double sum = alpha.col(s).sum() + alpha_ground(s);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

namespace {

// Node layout of the finite-difference grid. Nodes sit at
// x = -W/2 - ext + i h and z = j h, the electrode plane being z = 0.
struct Mesh {
  int nx = 0;  // number of cells in x
  int nz = 0;
  double h = 0.0;  // nm
  double x_left = 0.0;
  int j_opening = 0;  // row of the channel opening
  double half_width = 0.0;

  double x(int i) const { return x_left + h * i; }
  int flat(int i, int j) const { return i * (nz + 1) + j; }
};

}  // namespace

CouplingTable solve_coupling_constants(const DeviceGeometry& g,
                                       const UnitSystem& units) {
  g.validate();
  if (g.grid_spacing_nm > 10.0) {
    throw InvalidArgument("solve_coupling_constants: grid spacing must be <= 10 nm");
  }
  Mesh m;
  m.h = g.grid_spacing_nm;
  const double width = g.channel_width_um * 1e3;
  const double depth = g.channel_depth_um * 1e3;
  const double ext = g.ground_plane_extent_um * 1e3;
  const double vac = g.vacuum_height_um * 1e3;
  m.half_width = width / 2.0;
  m.nx = static_cast<int>(std::lround((width + 2.0 * ext) / m.h));
  m.nz = static_cast<int>(std::lround((depth + vac) / m.h));
  m.x_left = -m.half_width - ext;
  m.j_opening = static_cast<int>(std::lround(depth / m.h));
  const double tol = 1e-9 * m.h;

  const int ne = g.n_electrodes;
  const int n_cond = ne + 1;  // last conductor is ground
  const double pitch = g.electrode_width_nm + g.electrode_gap_nm;
  const double first_edge =
      -(ne * g.electrode_width_nm + (ne - 1) * g.electrode_gap_nm) / 2.0;

  // Boundary weights: for a fixed node, the potential it takes when
  // conductor c is at unit voltage and all others are grounded.
  struct Fixed {
    int c0 = -1, c1 = -1;
    double w0 = 0.0, w1 = 0.0;
  };
  const int n_nodes = (m.nx + 1) * (m.nz + 1);
  std::vector<Fixed> fixed(n_nodes);
  std::vector<char> is_fixed(n_nodes, 0);
  auto set_ground = [&](int node) {
    is_fixed[node] = 1;
    fixed[node] = Fixed{ne, -1, 1.0, 0.0};
  };

  for (int i = 0; i <= m.nx; ++i) {
    const double x = m.x(i);
    const bool outside_channel = std::abs(x) >= m.half_width - tol;
    for (int j = 0; j <= m.nz; ++j) {
      const int node = m.flat(i, j);
      const bool box = i == 0 || i == m.nx || j == m.nz;
      const bool wall = outside_channel && j <= m.j_opening;
      if (box || wall) {
        set_ground(node);
        continue;
      }
      if (j != 0) continue;
      // Channel floor: electrode, or a gap interpolating between neighbours.
      is_fixed[node] = 1;
      int on = -1;
      for (int e = 0; e < ne; ++e) {
        const double a = first_edge + e * pitch;
        if (x >= a - tol && x <= a + g.electrode_width_nm + tol) on = e;
      }
      if (on >= 0) {
        fixed[node] = Fixed{on, -1, 1.0, 0.0};
        continue;
      }
      double left_x = -m.half_width, right_x = m.half_width;
      int left_c = ne, right_c = ne;
      for (int e = 0; e < ne; ++e) {
        const double a = first_edge + e * pitch;
        const double b = a + g.electrode_width_nm;
        if (b <= x && b > left_x) { left_x = b; left_c = e; }
        if (a >= x && a < right_x) { right_x = a; right_c = e; }
      }
      const double t = (x - left_x) / (right_x - left_x);
      fixed[node] = Fixed{left_c, right_c, 1.0 - t, t};
    }
  }

  std::vector<int> index(n_nodes, -1);
  int n_unknown = 0;
  for (int node = 0; node < n_nodes; ++node) {
    if (!is_fixed[node]) index[node] = n_unknown++;
  }

  // Five-point stencil of the negative Laplacian (SPD), Dirichlet data moved
  // to the right-hand side; one column per conductor.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n_unknown) * 5);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_unknown, n_cond);
  constexpr int di[4] = {1, -1, 0, 0};
  constexpr int dj[4] = {0, 0, 1, -1};
  for (int i = 0; i <= m.nx; ++i) {
    for (int j = 0; j <= m.nz; ++j) {
      const int row = index[m.flat(i, j)];
      if (row < 0) continue;
      triplets.emplace_back(row, row, 4.0);
      for (int k = 0; k < 4; ++k) {
        const int nb = m.flat(i + di[k], j + dj[k]);
        if (index[nb] >= 0) {
          triplets.emplace_back(row, index[nb], -1.0);
        } else {
          const Fixed& f = fixed[nb];
          rhs(row, f.c0) += f.w0;
          if (f.c1 >= 0) rhs(row, f.c1) += f.w1;
        }
      }
    }
  }
  Eigen::SparseMatrix<double> a(n_unknown, n_unknown);
  a.setFromTriplets(triplets.begin(), triplets.end());
  triplets.clear();
  triplets.shrink_to_fit();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  if (solver.info() != Eigen::Success) {
    throw SolverError("Laplace solve: factorization failed");
  }
  Eigen::MatrixXd sol = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !sol.allFinite()) {
    throw SolverError("Laplace solve: back-substitution failed");
  }
  const double residual = (a * sol - rhs).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "Laplace solve: residual %.3e exceeds 1e-10", residual);
    throw SolverError(msg);
  }

  // Sample along the channel opening, wall to wall.
  CouplingTable table;
  table.solver_residual = residual;
  table.grid_spacing_nm = m.h;
  table.geometry_hash = g.hash(units.x0_nm);
  std::vector<int> columns;
  for (int i = 0; i <= m.nx; ++i) {
    if (std::abs(m.x(i)) <= m.half_width + tol) columns.push_back(i);
  }
  const auto ns = static_cast<Eigen::Index>(columns.size());
  table.x.resize(columns.size());
  table.alpha.resize(ne, ns);
  table.alpha_ground.resize(ns);
  for (Eigen::Index s = 0; s < ns; ++s) {
    const int i = columns[static_cast<std::size_t>(s)];
    const int node = m.flat(i, m.j_opening);
    table.x[static_cast<std::size_t>(s)] = units.nm_to_dimensionless(m.x(i));
    for (int c = 0; c < n_cond; ++c) {
      double value;
      if (index[node] >= 0) {
        value = sol(index[node], c);
      } else {
        const Fixed& f = fixed[node];
        value = (f.c0 == c ? f.w0 : 0.0) + (f.c1 == c ? f.w1 : 0.0);
      }
      if (c < ne) {
        table.alpha(c, s) = value;
      } else {
        table.alpha_ground(s) = value;
      }
    }
  }
  return table;
}

void write_coupling_csv(std::ostream& out, const CouplingTable& table) {
  const int ne = table.n_electrodes();
  char meta[160];
  std::snprintf(meta, sizeof meta, "# geometry_hash=%s grid_spacing_nm=%.17g solver_residual=%.17g\n",
                table.geometry_hash.empty() ? "-" : table.geometry_hash.c_str(),
                table.grid_spacing_nm, table.solver_residual);
  out << meta << "x";
  for (int e = 1; e <= ne; ++e) out << ",alpha_" << e;
  out << ",alpha_ground\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.14e", v);
    out << buf;
  };
  for (std::size_t s = 0; s < table.size(); ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    put(table.x[s]);
    for (int e = 0; e < ne; ++e) {
      out << ',';
      put(table.alpha(e, col));
    }
    out << ',';
    put(table.alpha_ground(col));
    out << '\n';
  }
}

CouplingTable read_coupling_csv(std::istream& in) {
  std::string line;
  CouplingTable t;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) != 0) {
      have_header = true;
      break;
    }
    std::stringstream meta(line.substr(1));
    std::string item;
    while (meta >> item) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (key == "geometry_hash" && value != "-") t.geometry_hash = value;
      if (key == "grid_spacing_nm") t.grid_spacing_nm = std::stod(value);
      if (key == "solver_residual") t.solver_residual = std::stod(value);
    }
  }
  if (!have_header) throw InvalidArgument("coupling CSV: empty input");
  const auto n_fields = std::count(line.begin(), line.end(), ',') + 1;
  if (n_fields < 3 || line.rfind("x,", 0) != 0) {
    throw InvalidArgument("coupling CSV: malformed header");
  }
  const int ne = static_cast<int>(n_fields - 2);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<long>(row.size()) != n_fields) {
      throw InvalidArgument("coupling CSV: ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw InvalidArgument("coupling CSV: need at least two samples");
  const auto ns = static_cast<Eigen::Index>(rows.size());
  t.x.resize(rows.size());
  t.alpha.resize(ne, ns);
  t.alpha_ground.resize(ns);
  for (Eigen::Index s = 0; s < ns; ++s) {
    const auto& r = rows[static_cast<std::size_t>(s)];
    t.x[static_cast<std::size_t>(s)] = r[0];
    for (int e = 0; e < ne; ++e) t.alpha(e, s) = r[static_cast<std::size_t>(e) + 1];
    t.alpha_ground(s) = r.back();
  }
  return t;
}

CouplingTable load_or_solve_coupling(const DeviceGeometry& geometry,
                                     const UnitSystem& units,
                                     const std::filesystem::path& cache_dir,
                                     bool* cache_hit) {
  const std::string key = geometry.hash(units.x0_nm);
  const auto file = cache_dir / ("coupling_" + key + ".csv");
  if (std::filesystem::exists(file)) {
    std::ifstream in(file);
    CouplingTable t = read_coupling_csv(in);
    t.geometry_hash = key;
    t.grid_spacing_nm = geometry.grid_spacing_nm;
    if (cache_hit) *cache_hit = true;
    return t;
  }
  CouplingTable t = solve_coupling_constants(geometry, units);
  std::filesystem::create_directories(cache_dir);
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    write_coupling_csv(out, t);
  }
  std::filesystem::rename(tmp, file);
  if (cache_hit) *cache_hit = false;
  return t;
}

PotentialProfile assemble_potential(const CouplingTable& table,
                                    std::span<const double> voltages_mv,
                                    const UnitSystem& units) {
  if (static_cast<int>(voltages_mv.size()) != table.n_electrodes()) {
    throw InvalidArgument("assemble_potential: voltage count does not match electrodes");
  }
  PotentialProfile p;
  p.x = table.x;
  p.voltages_mv.assign(voltages_mv.begin(), voltages_mv.end());
  const Eigen::Map<const Eigen::VectorXd> volts(voltages_mv.data(),
                                                 static_cast<Eigen::Index>(voltages_mv.size()));
  const Eigen::VectorXd phi_mv = table.alpha.transpose() * volts;
  const double scale = -units.energy_per_mv();
  p.v.resize(p.x.size());
  for (std::size_t s = 0; s < p.v.size(); ++s) {
    p.v[s] = scale * phi_mv(static_cast<Eigen::Index>(s));
  }
  return p;
}

double interpolate_potential(const PotentialProfile& profile, double x) {
  const auto& xs = profile.x;
  if (xs.size() < 2 || !(x >= xs.front() && x <= xs.back())) {
    throw RangeError("interpolate_potential: position outside the sampled range");
  }
  if (x == xs.back()) return profile.v.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return profile.v[i] + t * (profile.v[i + 1] - profile.v[i]);
}

namespace {

// Vertex offset (in samples, within [-1/2, 1/2]) of the parabola through
// three equally spaced points.
double parabola_offset(double y0, double y1, double y2) {
  const double curv = y0 - 2.0 * y1 + y2;
  if (curv == 0.0) return 0.0;
  return std::clamp(0.5 * (y0 - y2) / curv, -0.5, 0.5);
}

}  // namespace

Barrier find_barrier(const PotentialProfile& profile) {
  const auto& v = profile.v;
  const std::size_t n = v.size();
  if (n < 5) throw NotDoubleWell("find_barrier: profile too short");
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (v[i] < v[i - 1] && v[i] <= v[i + 1]) minima.push_back(i);
  }
  if (minima.size() != 2) {
    throw NotDoubleWell("not a double well: found " + std::to_string(minima.size()) +
                        " local minima");
  }
  const std::size_t a = minima[0], b = minima[1];
  std::size_t top = 0, n_max = 0;
  for (std::size_t i = a + 1; i < b; ++i) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) {
      top = i;
      ++n_max;
    }
  }
  if (n_max != 1) {
    throw NotDoubleWell("not a double well: " + std::to_string(n_max) +
                        " interior maxima between the minima");
  }
  const double h = profile.spacing();
  Barrier out;
  out.x_b = profile.x[top] + h * parabola_offset(v[top - 1], v[top], v[top + 1]);
  out.v_b = interpolate_potential(profile, out.x_b);
  out.x_min_left = profile.x[a] + h * parabola_offset(v[a - 1], v[a], v[a + 1]);
  out.x_min_right = profile.x[b] + h * parabola_offset(v[b - 1], v[b], v[b + 1]);
  out.v_min_left = interpolate_potential(profile, out.x_min_left);
  out.v_min_right = interpolate_potential(profile, out.x_min_right);
  return out;
}

}  // namespace heliqsim
