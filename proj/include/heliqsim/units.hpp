#pragma once

namespace heliqsim {

/// CODATA 2018 values (SI).
namespace codata {
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double electron_mass = 9.1093837015e-31;  // kg
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double pi = 3.14159265358979323846;
}  // namespace codata

/// Dimensionless unit system of the two-electron Hamiltonian.
///
/// Lengths are measured in x0 and energies in E_d = hbar^2 / (m_e x0^2).
/// The trap potential entering the Hamiltonian is v(x) = -e phi(x) / E_d,
/// and the electron-electron repulsion is kappa / |x1 - x2| with
/// kappa = e^2 / (4 pi eps0 x0 E_d), which equals x0 divided by the Bohr
/// radius. Everything downstream of this type is dimensionless; GHz, mV and
/// nm only appear at I/O boundaries.
struct UnitSystem {
  double x0_nm = 0.0;
  double energy_j = 0.0;       // E_d
  double freq_unit_ghz = 0.0;  // E_d / (2 pi hbar), in GHz
  double kappa = 0.0;

  double x0_m() const { return x0_nm * 1e-9; }
  /// Dimensionless potential energy of an electron per millivolt of
  /// electrostatic potential (magnitude of -e * 1 mV / E_d).
  double energy_per_mv() const {
    return codata::elementary_charge * 1e-3 / energy_j;
  }
  double nm_to_dimensionless(double nm) const { return nm / x0_nm; }
};

/// Throws InvalidArgument unless x0_nm > 0 and finite.
UnitSystem derive_units(double x0_nm);

double energy_to_ghz(double energy, const UnitSystem& units);
double ghz_to_energy(double ghz, const UnitSystem& units);

}  // namespace heliqsim
