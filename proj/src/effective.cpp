#include "heliqsim/effective.hpp"

#include <algorithm>
#include <cmath>

#include "heliqsim/error.hpp"

namespace heliqsim {

namespace {

constexpr int kHalfWindow = 3;

LocalFit fit_at_node(const PotentialProfile& p, long i) {
  const long n = static_cast<long>(p.size());
  const long c = std::clamp(i, static_cast<long>(kHalfWindow), n - 1 - kHalfWindow);
  const double h = p.spacing();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (long k = -kHalfWindow; k <= kHalfWindow; ++k) {
    const double v = p.v[static_cast<std::size_t>(c + k)];
    const auto s = static_cast<double>(k);
    s0 += v;
    s1 += s * v;
    s2 += s * s * v;
  }
  // Normal equations for a + b s + c s^2 on s = -3..3: sum s^2 = 28,
  // sum s^4 = 196, determinant 7 * 196 - 28^2 = 588.
  const double a = (196.0 * s0 - 28.0 * s2) / 588.0;
  const double b = s1 / 28.0;
  const double cc = (7.0 * s2 - 28.0 * s0) / 588.0;
  const double t = static_cast<double>(i - c);  // offset of node i inside the window
  return {a + b * t + cc * t * t, (b + 2.0 * cc * t) / h, 2.0 * cc / (h * h)};
}

}  // namespace

LocalFit local_quadratic_fit(const PotentialProfile& p, double x) {
  if (p.size() < 2 * kHalfWindow + 1) {
    throw InvalidArgument("local_quadratic_fit: profile has fewer than 7 samples");
  }
  if (!(x >= p.x_min() && x <= p.x_max())) {
    throw RangeError("local_quadratic_fit: position outside the profile");
  }
  const double h = p.spacing();
  const double u = (x - p.x_min()) / h;
  const long last = static_cast<long>(p.size()) - 1;
  const long i = std::min(static_cast<long>(std::floor(u)), last - 1);
  const double t = u - static_cast<double>(i);
  const LocalFit a = fit_at_node(p, i);
  const LocalFit b = fit_at_node(p, i + 1);
  // Each window's own quadratic is evaluated at x, then the two are blended.
  auto eval = [&](const LocalFit& f, double offset) {
    return LocalFit{f.value + f.slope * h * offset + 0.5 * f.curvature * h * h * offset * offset,
                    f.slope + f.curvature * h * offset, f.curvature};
  };
  const LocalFit fa = eval(a, t);
  const LocalFit fb = eval(b, t - 1.0);
  return {(1.0 - t) * fa.value + t * fb.value, (1.0 - t) * fa.slope + t * fb.slope,
          (1.0 - t) * fa.curvature + t * fb.curvature};
}

Equilibrium equilibrium_positions(const PotentialProfile& profile, double kappa) {
  if (kappa < 0.0) throw InvalidArgument("equilibrium_positions: kappa must be >= 0");
  const Barrier b = find_barrier(profile);
  double xl = b.x_min_left;
  double xr = b.x_min_right;

  auto residual = [&](double l, double r, Eigen::Vector2d& f, Eigen::Matrix2d* jac) {
    const double d = r - l;
    const LocalFit fl = local_quadratic_fit(profile, l);
    const LocalFit fr = local_quadratic_fit(profile, r);
    const double force = kappa / (d * d);
    f << fl.slope + force, fr.slope - force;
    if (jac) {
      const double k3 = 2.0 * kappa / (d * d * d);
      *jac << fl.curvature + k3, -k3, -k3, fr.curvature + k3;
    }
  };

  Equilibrium eq;
  Eigen::Vector2d f;
  Eigen::Matrix2d jac;
  residual(xl, xr, f, &jac);
  const double scale = std::max(1.0, kappa);
  for (int it = 1; it <= 100; ++it) {
    eq.iterations = it;
    const Eigen::Vector2d step = jac.colPivHouseholderQr().solve(-f);
    if (!step.allFinite()) throw SolverError("equilibrium_positions: singular Jacobian");
    double damping = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, damping *= 0.5) {
      const double nl = xl + damping * step(0);
      const double nr = xr + damping * step(1);
      if (!(nl > profile.x_min() && nr < profile.x_max() && nr > nl)) continue;
      Eigen::Vector2d nf;
      Eigen::Matrix2d nj;
      residual(nl, nr, nf, &nj);
      if (nf.norm() < f.norm() || nf.norm() < 1e-14 * scale) {
        xl = nl;
        xr = nr;
        f = nf;
        jac = nj;
        accepted = true;
        break;
      }
    }
    if (f.norm() < 1e-12 * scale) break;
    if (!accepted) throw SolverError("equilibrium_positions: Newton iteration stalled");
  }
  if (!(f.norm() < 1e-9 * scale)) {
    throw SolverError("equilibrium_positions: no convergence");
  }
  eq.x_left = xl;
  eq.x_right = xr;
  eq.d = xr - xl;
  eq.residual = f.norm();
  return eq;
}

EffectiveParams effective_params(double omega_1, double omega_2, double d, double kappa) {
  if (!(d > 0.0)) throw InvalidArgument("effective_params: separation must be positive");
  if (!(omega_1 > 0.0 && omega_2 > 0.0)) {
    throw NotDoubleWell("effective_params: non-positive trap curvature");
  }
  EffectiveParams p;
  p.d = d;
  p.omega_1 = omega_1;
  p.omega_2 = omega_2;
  const double wc2 = 2.0 * kappa / (d * d * d);
  p.omega_c = std::sqrt(wc2);
  p.omega_left = std::sqrt(omega_1 * omega_1 + wc2);
  p.omega_right = std::sqrt(omega_2 * omega_2 + wc2);
  p.g = wc2 / (2.0 * std::sqrt(p.omega_left * p.omega_right));
  p.theta = 0.5 * std::atan(2.0 * p.g / (p.omega_left - p.omega_right));
  return p;
}

EffectiveParams effective_params(const PotentialProfile& profile, const Equilibrium& eq,
                                 double kappa) {
  const double cl = local_quadratic_fit(profile, eq.x_left).curvature;
  const double cr = local_quadratic_fit(profile, eq.x_right).curvature;
  if (!(cl > 0.0 && cr > 0.0)) {
    throw NotDoubleWell("effective_params: equilibrium is not a trap minimum");
  }
  EffectiveParams p = effective_params(std::sqrt(cl), std::sqrt(cr), eq.d, kappa);
  p.x_left = eq.x_left;
  p.x_right = eq.x_right;
  return p;
}

HybridModes hybrid_modes(double omega_left, double omega_right, double g) {
  const double delta = omega_left - omega_right;
  const double split = std::sqrt(4.0 * g * g + delta * delta);
  return {0.5 * (omega_left + omega_right + split), 0.5 * (omega_left + omega_right - split)};
}

EffectiveZeta effective_zeta(double g, double detuning, double beta_left, double beta_right) {
  const double den_l = detuning + beta_left;
  const double den_r = detuning - beta_right;
  const double scale = std::max({std::abs(detuning), std::abs(beta_left),
                                 std::abs(beta_right), std::abs(g), 1e-300});
  EffectiveZeta z;
  z.near_pole = std::abs(den_l) < 1e-9 * scale || std::abs(den_r) < 1e-9 * scale;
  const double c = 2.0 * std::sqrt(2.0) * g;
  const double theta_l = std::atan(c / den_l);
  const double theta_r = std::atan(c / den_r);
  z.zeta = std::sqrt(2.0) * g * (std::tan(0.5 * theta_r) - std::tan(0.5 * theta_l));
  z.small_angle = 2.0 * g * g / den_r - 2.0 * g * g / den_l;
  return z;
}

double resonator_coupling_mhz(const ResonatorParams& p) {
  if (!(p.f_rf_ghz >= 0.0 && p.z_rf_ohm >= 0.0 && p.dalpha_dx_per_m >= 0.0 &&
        p.omega_e_rad_s > 0.0)) {
    throw InvalidArgument("resonator_coupling: parameters must be non-negative");
  }
  const double rate = codata::elementary_charge * p.f_rf_ghz * 1e9 * p.dalpha_dx_per_m *
                      std::sqrt(p.z_rf_ohm / (codata::electron_mass * p.omega_e_rad_s));
  return rate * 1e-6;
}

}  // namespace heliqsim
