#include "grosc/carrier_statistics.hpp"

#include <algorithm>
#include <cmath>

namespace grosc {

namespace {
void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}
}  // namespace

void MaterialParams::validate() const {
  require(donor_density >= 0, "material.donor_density must be >= 0");
  require(acceptor_density >= 0, "material.acceptor_density must be >= 0");
  require(trap_density >= 0, "material.trap_density must be >= 0");
  require(donor_energy > 0, "material.donor_energy must be > 0");
  require(acceptor_energy > 0, "material.acceptor_energy must be > 0");
  require(electron_mobility_ref > 0, "material.electron_mobility_ref must be > 0");
  require(hole_mobility_ref > 0, "material.hole_mobility_ref must be > 0");
  require(mobility_max > 0, "material.mobility_max must be > 0");
  require(std::isfinite(mobility_exponent), "material.mobility_exponent must be finite");
}

void DeviceParams::validate() const {
  require(i_region_width > 0, "device.i_region_width must be > 0");
  require(junction_area > 0, "device.junction_area must be > 0");
  require(load_resistance >= 0, "device.load_resistance must be >= 0");
  require(effective_permittivity > 0, "device.effective_permittivity must be > 0");
}

double ionized_donor_fraction(double donor_energy_ev, double temperature_k) {
  require(temperature_k > 0, "temperature must be > 0");
  require(donor_energy_ev > 0, "donor energy must be > 0");
  const double x = donor_energy_ev / (constants::kBoltzmannEv * temperature_k);
  // exp(-x)/(1+exp(-x)) stays finite for large x
  const double em = std::exp(-x);
  return em / (1.0 + em);
}

double occupied_donor_fraction(double donor_energy_ev, double temperature_k) {
  require(temperature_k > 0, "temperature must be > 0");
  require(donor_energy_ev > 0, "donor energy must be > 0");
  const double x = donor_energy_ev / (constants::kBoltzmannEv * temperature_k);
  return 1.0 / (1.0 + std::exp(-x));
}

double field_from_bias(double bias_v, double width_cm) {
  require(width_cm > 0, "i-region width must be > 0");
  return bias_v / width_cm;
}

DriftCurrent drift_current_density(double n, double p, double mu_n, double mu_p,
                                   double field) {
  const double q = constants::kElementaryCharge;
  return {q * (mu_n * n + mu_p * p) * field, mu_n * n * field};
}

double mobility(double temperature_k, double /*field*/, const MaterialParams& params) {
  require(temperature_k > 0, "temperature must be > 0");
  if (params.mobility_model == MobilityModel::kConstant) return params.electron_mobility_ref;
  const double mu =
      params.electron_mobility_ref * std::pow(300.0 / temperature_k, params.mobility_exponent);
  return std::min(mu, params.mobility_max);
}

}  // namespace grosc
