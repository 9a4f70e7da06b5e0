#include "heliqsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heliqsim/error.hpp"

namespace heliqsim {

namespace {

constexpr double kProbabilityCutoff = 1e-15;

void check_shapes(const Eigen::MatrixXd& c, const HartreeBasis& basis, const DvrGrid& left,
                  const DvrGrid& right) {
  if (c.rows() != basis.left.cols() || c.cols() != basis.right.cols() ||
      basis.left.rows() != left.size() || basis.right.rows() != right.size()) {
    throw InvalidArgument("density: coefficient, orbital and grid shapes disagree");
  }
}

}  // namespace

SchmidtDecomposition schmidt(const Eigen::MatrixXd& c) {
  if (c.size() == 0) throw InvalidArgument("schmidt: empty coefficient matrix");
  if (std::abs(c.norm() - 1.0) > 1e-10) {
    throw InvalidArgument("schmidt: coefficient matrix is not normalized");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

double entropy_from_probabilities(std::span<const double> p) {
  double s = 0.0;
  for (double q : p) {
    if (q >= kProbabilityCutoff) s -= q * std::log2(q);
  }
  return s;
}

double von_neumann_entropy(const SchmidtDecomposition& d) {
  std::vector<double> p(static_cast<std::size_t>(d.singular_values.size()));
  for (Eigen::Index k = 0; k < d.singular_values.size(); ++k) {
    p[static_cast<std::size_t>(k)] = d.singular_values(k) * d.singular_values(k);
  }
  return entropy_from_probabilities(p);
}

double entanglement_entropy(const Eigen::MatrixXd& c) { return von_neumann_entropy(schmidt(c)); }

Density particle_density(const Eigen::MatrixXd& c, const HartreeBasis& basis,
                         const DvrGrid& left, const DvrGrid& right) {
  check_shapes(c, basis, left, right);
  // On DVR nodes phi_i(x_a) = B_ai / sqrt(dx), so the left-well term of
  // the double sum is sum_j |sum_i C_ij B_ai|^2 / dx.
  const Eigen::MatrixXd amp_left = basis.left * c;                // [K_L x N_R]
  const Eigen::MatrixXd amp_right = basis.right * c.transpose();  // [K_R x N_L]
  Density out;
  out.x.reserve(left.x.size() + right.x.size());
  out.rho.reserve(out.x.capacity());
  for (Eigen::Index a = 0; a < left.size(); ++a) {
    out.x.push_back(left.x[static_cast<std::size_t>(a)]);
    out.rho.push_back(amp_left.row(a).squaredNorm() / left.dx);
  }
  for (Eigen::Index b = 0; b < right.size(); ++b) {
    out.x.push_back(right.x[static_cast<std::size_t>(b)]);
    out.rho.push_back(amp_right.row(b).squaredNorm() / right.dx);
  }
  return out;
}

Eigen::MatrixXd pair_density(const Eigen::MatrixXd& c, const HartreeBasis& basis,
                             const DvrGrid& left, const DvrGrid& right) {
  check_shapes(c, basis, left, right);
  const Eigen::MatrixXd psi = basis.left * c * basis.right.transpose();
  return psi.cwiseAbs2() / (left.dx * right.dx);
}

Eigen::MatrixXd orbital_densities(const Eigen::MatrixXd& orbitals, const DvrGrid& grid) {
  if (orbitals.rows() != grid.size()) {
    throw InvalidArgument("orbital_densities: orbital and grid sizes disagree");
  }
  return orbitals.cwiseAbs2() / grid.dx;
}

SpectralObservables spectral_observables(const TwoBodySpectrum& spectrum,
                                         const HartreeBasis& basis, const UnitSystem& units) {
  if (spectrum.size() < 6) throw InvalidArgument("spectral_observables: need 6 eigenstates");
  if (basis.eps_left.size() < 3 || basis.eps_right.size() < 3) {
    throw InvalidArgument("spectral_observables: need 3 Hartree levels per well");
  }
  auto ghz = [&](double e) { return energy_to_ghz(e, units); };
  const auto& el = basis.eps_left;
  const auto& er = basis.eps_right;
  const auto& e = spectrum.energies;

  SpectralObservables o;
  o.omega_left = ghz(el(1) - el(0));
  o.omega_right = ghz(er(1) - er(0));
  o.beta_left = ghz((el(2) - el(1)) - (el(1) - el(0)));
  o.beta_right = ghz((er(2) - er(1)) - (er(1) - er(0)));
  o.detuning = o.omega_left - o.omega_right;
  o.zeta = ghz(e(4) - e(2) - e(1) + e(0));
  o.energies.resize(static_cast<std::size_t>(spectrum.size()));
  o.entropies.resize(o.energies.size());
  for (Eigen::Index n = 0; n < spectrum.size(); ++n) {
    o.energies[static_cast<std::size_t>(n)] = ghz(e(n) - e(0));
    o.entropies[static_cast<std::size_t>(n)] = entanglement_entropy(spectrum.coefficients(n));
  }
  return o;
}

std::pair<Eigen::Index, Eigen::Index> dominant_product(const TwoBodySpectrum& spectrum,
                                                       Eigen::Index n) {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  spectrum.coefficients(n).cwiseAbs().maxCoeff(&i, &j);
  return {i, j};
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> product_labels(
    const TwoBodySpectrum& spectrum, Eigen::Index count) {
  count = std::min(count, spectrum.size());
  std::vector<bool> taken(static_cast<std::size_t>(spectrum.size()), false);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> labels;
  for (Eigen::Index n = 0; n < count; ++n) {
    Eigen::Index best = -1;
    double weight = -1.0;
    for (Eigen::Index k = 0; k < spectrum.vectors.rows(); ++k) {
      const double w = spectrum.vectors(k, n) * spectrum.vectors(k, n);
      if (!taken[static_cast<std::size_t>(k)] && w > weight) {
        weight = w;
        best = k;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    labels.emplace_back(best / spectrum.n_right, best % spectrum.n_right);
  }
  return labels;
}

GapCoupling extract_gap_coupling(std::span<const double> lambdas, std::span<const double> gaps) {
  if (lambdas.size() != gaps.size() || lambdas.size() < 3) {
    throw InvalidArgument("extract_gap_coupling: need at least 3 matching samples");
  }
  const auto it = std::min_element(gaps.begin(), gaps.end());
  const auto k = static_cast<std::size_t>(it - gaps.begin());
  if (k == 0 || k + 1 == gaps.size()) {
    throw RangeError("extract_gap_coupling: gap minimum lies on the sweep boundary");
  }
  const double x0 = lambdas[k - 1], x1 = lambdas[k], x2 = lambdas[k + 1];
  const double y0 = gaps[k - 1], y1 = gaps[k], y2 = gaps[k + 1];
  // Newton form of the interpolating parabola.
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  GapCoupling out{x1, 0.5 * y1, k};
  if (curv > 0.0) {
    const double xs = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
    if (xs >= x0 && xs <= x2) {
      out.lambda_star = xs;
      out.g = 0.5 * (y0 + d01 * (xs - x0) + curv * (xs - x0) * (xs - x1));
    }
  }
  return out;
}

std::vector<Eigen::Index> track_states(const Eigen::MatrixXd& previous,
                                       const Eigen::MatrixXd& current, Eigen::Index count,
                                       double* min_overlap) {
  if (previous.rows() != current.rows() || count > previous.cols() ||
      count > current.cols()) {
    throw InvalidArgument("track_states: incompatible eigenvector sets");
  }
  const Eigen::MatrixXd ov = (previous.leftCols(count).transpose() * current).cwiseAbs();
  std::vector<Eigen::Index> match(static_cast<std::size_t>(count), -1);
  std::vector<bool> used(static_cast<std::size_t>(current.cols()), false);
  double weakest = std::numeric_limits<double>::infinity();
  for (Eigen::Index step = 0; step < count; ++step) {
    double best = -1.0;
    Eigen::Index bp = 0, bc = 0;
    for (Eigen::Index p = 0; p < count; ++p) {
      if (match[static_cast<std::size_t>(p)] >= 0) continue;
      for (Eigen::Index c = 0; c < current.cols(); ++c) {
        if (!used[static_cast<std::size_t>(c)] && ov(p, c) > best) {
          best = ov(p, c);
          bp = p;
          bc = c;
        }
      }
    }
    match[static_cast<std::size_t>(bp)] = bc;
    used[static_cast<std::size_t>(bc)] = true;
    weakest = std::min(weakest, best);
  }
  if (min_overlap) *min_overlap = weakest;
  return match;
}

}  // namespace heliqsim
