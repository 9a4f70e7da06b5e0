#include "heliqsim/units.hpp"

#include <cmath>

#include "heliqsim/error.hpp"

namespace heliqsim {

UnitSystem derive_units(double x0_nm) {
  if (!(x0_nm > 0.0) || !std::isfinite(x0_nm)) {
    throw InvalidArgument("derive_units: x0 must be a positive length");
  }
  using namespace codata;
  UnitSystem u;
  u.x0_nm = x0_nm;
  const double x0 = x0_nm * 1e-9;
  u.energy_j = hbar * hbar / (electron_mass * x0 * x0);
  u.freq_unit_ghz = u.energy_j / (2.0 * pi * hbar) * 1e-9;
  u.kappa = elementary_charge * elementary_charge /
            (4.0 * pi * vacuum_permittivity * x0 * u.energy_j);
  return u;
}

double energy_to_ghz(double energy, const UnitSystem& units) {
  return energy * units.freq_unit_ghz;
}

double ghz_to_energy(double ghz, const UnitSystem& units) {
  return ghz / units.freq_unit_ghz;
}

}  // namespace heliqsim
