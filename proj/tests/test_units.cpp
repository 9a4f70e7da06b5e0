#include <doctest.h>

#include <cmath>

#include "heliqsim/error.hpp"
#include "heliqsim/units.hpp"

using namespace heliqsim;

TEST_CASE("units at 123 nm") {
  const UnitSystem u = derive_units(123.0);
  // hbar / (2 pi m x0^2), written out directly
  const double x0 = 123e-9;
  const double f = 1.054571817e-34 / (2.0 * M_PI * 9.1093837015e-31 * x0 * x0) * 1e-9;
  CHECK(u.freq_unit_ghz == doctest::Approx(f).epsilon(1e-14));
  CHECK(u.freq_unit_ghz == doctest::Approx(1.218).epsilon(1e-3));
  CHECK(u.energy_j == doctest::Approx(8.07e-25).epsilon(2e-3));
  // x0 over the Bohr radius
  CHECK(u.kappa == doctest::Approx(123e-9 / 5.29177210903e-11).epsilon(1e-8));
  CHECK(std::abs(u.kappa - 2326.0) < 2.0);
}

TEST_CASE("energy conversion") {
  const UnitSystem u = derive_units(123.0);
  CHECK(energy_to_ghz(0.0, u) == 0.0);
  CHECK(energy_to_ghz(1.0, u) == doctest::Approx(u.freq_unit_ghz));
  CHECK(energy_to_ghz(9.03, u) == doctest::Approx(11.0).epsilon(2e-3));
  for (double e : {-3.0, 0.25, 17.0}) {
    CHECK(ghz_to_energy(energy_to_ghz(e, u), u) == doctest::Approx(e).epsilon(1e-15));
  }
}

TEST_CASE("kappa scales linearly with x0") {
  const double k1 = derive_units(50.0).kappa;
  const double k2 = derive_units(100.0).kappa;
  CHECK(k2 / k1 == doctest::Approx(2.0).epsilon(1e-13));
  const double f1 = derive_units(50.0).freq_unit_ghz;
  const double f2 = derive_units(100.0).freq_unit_ghz;
  CHECK(f1 / f2 == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("invalid length unit") {
  CHECK_THROWS_AS(derive_units(0.0), InvalidArgument);
  CHECK_THROWS_AS(derive_units(-5.0), InvalidArgument);
  CHECK_THROWS_AS(derive_units(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(derive_units(INFINITY), InvalidArgument);
}
