#pragma once

#include "heliqsim/electrostatics.hpp"
#include "heliqsim/units.hpp"

namespace heliqsim {

/// Smoothed derivatives of a sampled profile: a quadratic least-squares fit
/// over 7 samples around each node, blended linearly between the two nodes
/// that bracket x so the result is continuous in x.
struct LocalFit {
  double value = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
};
LocalFit local_quadratic_fit(const PotentialProfile& profile, double x);

struct Equilibrium {
  double x_left = 0.0;
  double x_right = 0.0;
  double d = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Classical equilibrium of two point charges in the trap:
/// v'(x_L) = -kappa/d^2 and v'(x_R) = +kappa/d^2, solved by damped Newton
/// from the bare minima. Throws SolverError if Newton fails.
Equilibrium equilibrium_positions(const PotentialProfile& profile, double kappa);

struct EffectiveParams {
  double x_left = 0.0;
  double x_right = 0.0;
  double d = 0.0;
  double omega_c = 0.0;      // sqrt(2 kappa / d^3)
  double omega_1 = 0.0;      // bare curvature frequencies
  double omega_2 = 0.0;
  double omega_left = 0.0;   // sqrt(omega_1^2 + omega_c^2)
  double omega_right = 0.0;
  double g = 0.0;            // omega_c^2 / (2 sqrt(omega_left omega_right))
  double theta = 0.0;        // 2 theta = atan(2 g / Delta)
};

/// Dimensionless (frequency-unit) parameters of the coupled-oscillator
/// model. Throws NotDoubleWell on a non-positive curvature.
EffectiveParams effective_params(const PotentialProfile& profile, const Equilibrium& eq,
                                 double kappa);

/// Same formulas with the curvatures given directly.
EffectiveParams effective_params(double omega_1, double omega_2, double d, double kappa);

struct HybridModes {
  double plus = 0.0;
  double minus = 0.0;
};
HybridModes hybrid_modes(double omega_left, double omega_right, double g);

struct EffectiveZeta {
  double zeta = 0.0;
  /// 2 g^2 / (Delta - beta_R) - 2 g^2 / (Delta + beta_L), the leading term of
  /// `zeta` for small mixing angles.
  double small_angle = 0.0;
  bool near_pole = false;
};

/// sqrt(2) g (tan(theta_R/2) - tan(theta_L/2)) with
/// tan theta_L = 2 sqrt(2) g / (Delta + beta_L) and
/// tan theta_R = 2 sqrt(2) g / (Delta - beta_R).
EffectiveZeta effective_zeta(double g, double detuning, double beta_left, double beta_right);

struct ResonatorParams {
  double f_rf_ghz = 7.0;
  double z_rf_ohm = 50.0;
  double dalpha_dx_per_m = 0.5e6;
  double omega_e_rad_s = 2.0 * codata::pi * 5e9;
};

/// e f_RF (d alpha / dx) sqrt(Z_RF / (m_e omega_e)), read as g/2pi, in MHz.
double resonator_coupling_mhz(const ResonatorParams& p);

}  // namespace heliqsim
