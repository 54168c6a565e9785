#include <cmath>
#include <random>

#include <doctest.h>

#include "grosc/carrier_statistics.hpp"

using namespace grosc;

namespace {

// 40-digit evaluations of 1/(1+exp(0.044/(8.617e-5 T))).
struct IonizationOracle {
  double temperature;
  double ionized;
  double occupied;
};

constexpr IonizationOracle kOracle[] = {
    {10.0, 6.669885311808547583518564e-23, 0.9999999999999999999999333},
    {77.0, 0.001316567764520857625502402, 0.9986834322354791423744976},
    {300.0, 0.1541961718972212267053371, 0.8458038281027787732946629},
};

}  // namespace

TEST_CASE("ionized fraction matches the high precision oracle") {
  for (const auto& o : kOracle) {
    CAPTURE(o.temperature);
    const double got = ionized_donor_fraction(0.044, o.temperature);
    CHECK(std::abs(got - o.ionized) <= 1e-10 * o.ionized);
    CHECK(std::abs(occupied_donor_fraction(0.044, o.temperature) - o.occupied) <= 1e-15);
  }
  CHECK(ionized_donor_fraction(0.044, 300.0) == doctest::Approx(0.1542).epsilon(0.0005 / 0.1542));
  const double cold = ionized_donor_fraction(0.044, 10.0);
  CHECK(cold / 6.7e-23 < 1.05);
  CHECK(6.7e-23 / cold < 1.05);
  CHECK(ionized_donor_fraction(0.044, 1e9) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("ionized fraction is monotone in temperature and donor energy") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ed(1e-3, 0.3);
  std::uniform_real_distribution<double> tt(1.0, 500.0);
  std::uniform_real_distribution<double> bump(1.0001, 1.5);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double e = ed(rng), t = tt(rng), k = bump(rng);
    const double base = ionized_donor_fraction(e, t);
    if (!(ionized_donor_fraction(e, t * k) >= base)) ++violations;
    if (!(ionized_donor_fraction(e * k, t) <= base)) ++violations;
    if (!(base >= 0.0 && base <= 0.5)) ++violations;
    const double sum = base + occupied_donor_fraction(e, t);
    if (std::abs(sum - 1.0) > 1e-15) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("ionization rejects non-positive inputs") {
  CHECK_THROWS_AS(ionized_donor_fraction(0.044, 0.0), DomainError);
  CHECK_THROWS_AS(ionized_donor_fraction(0.044, -3.0), DomainError);
  CHECK_THROWS_AS(ionized_donor_fraction(0.0, 10.0), DomainError);
  CHECK_THROWS_AS(occupied_donor_fraction(-0.1, 10.0), DomainError);
}

TEST_CASE("field from bias") {
  CHECK(field_from_bias(0.0, 0.0565) == 0.0);
  const double e = field_from_bias(7.0, 0.0565);
  CHECK(e == doctest::Approx(123.89380530973451).epsilon(1e-14));
  CHECK(std::abs(e - 120.0) / 120.0 < 0.04);
  CHECK(field_from_bias(-7.0, 0.0565) == doctest::Approx(-e));
  CHECK_THROWS_AS(field_from_bias(7.0, 0.0), DomainError);
  CHECK_THROWS_AS(field_from_bias(7.0, -1.0), DomainError);
}

TEST_CASE("drift current") {
  const auto zero = drift_current_density(1e10, 1e10, 1350, 480, 0.0);
  CHECK(zero.charge_flux == 0.0);
  CHECK(zero.electron_flux == 0.0);

  const auto est = drift_current_density(1e-3, 0.0, 1350, 480, 120.0);
  CHECK(est.electron_flux == doctest::Approx(162.0).epsilon(1e-12));
  CHECK(std::abs(est.electron_flux - 160.0) / 160.0 < 0.03);
  CHECK(est.charge_flux == doctest::Approx(162.0 * 1.602e-19).epsilon(1e-12));

  const double q = constants::kElementaryCharge;
  const auto sym = drift_current_density(3e11, 3e11, 700, 700, 45.0);
  CHECK(sym.charge_flux == doctest::Approx(2 * q * 700 * 3e11 * 45.0).epsilon(1e-14));
}

TEST_CASE("mobility models") {
  MaterialParams m;
  CHECK(mobility(4.0, 10.0, m) == 1350.0);
  CHECK(mobility(300.0, 0.0, m) == 1350.0);

  m.mobility_model = MobilityModel::kPowerLaw;
  m.mobility_exponent = 0.0;
  CHECK(mobility(12.0, 0.0, m) == doctest::Approx(1350.0));
  m.mobility_exponent = 1.0;
  CHECK(mobility(150.0, 0.0, m) == doctest::Approx(2700.0).epsilon(1e-14));
  CHECK(mobility(1e-3, 0.0, m) == doctest::Approx(1e5));
}

TEST_CASE("parameter validation") {
  MaterialParams m;
  CHECK_NOTHROW(m.validate());
  m.trap_density = -1;
  CHECK_THROWS_AS(m.validate(), DomainError);

  DeviceParams d;
  CHECK_NOTHROW(d.validate());
  d.i_region_width = 0;
  CHECK_THROWS_AS(d.validate(), DomainError);
}
