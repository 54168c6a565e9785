#pragma once

#include <stdexcept>
#include <string>

namespace grosc {

/// Raised when a physical input lies outside the domain of a model function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace constants {
inline constexpr double kBoltzmannEv = 8.617e-5;       // eV/K
inline constexpr double kElementaryCharge = 1.602e-19;  // C
}  // namespace constants

enum class MobilityModel { kConstant, kPowerLaw };

/// Cryogenic silicon, dopant and defect constants. CGS-practical units
/// throughout (cm, cm^-3, V/cm, cm^2/Vs).
struct MaterialParams {
  double donor_density = 1e19;     // cm^-3
  double acceptor_density = 1e19;  // cm^-3
  double donor_energy = 0.044;     // eV below the conduction band
  double acceptor_energy = 0.045;  // eV above the valence band
  double electron_mobility_ref = 1350.0;  // cm^2/Vs
  double hole_mobility_ref = 480.0;       // cm^2/Vs
  double trap_density = 1e12;             // cm^-3

  MobilityModel mobility_model = MobilityModel::kConstant;
  double mobility_exponent = 1.5;  // power-law mode only
  double mobility_max = 1e5;       // power-law clamp, cm^2/Vs

  double boltzmann() const { return constants::kBoltzmannEv; }
  double elementary_charge() const { return constants::kElementaryCharge; }

  /// Throws DomainError naming the first violated invariant.
  void validate() const;
};

struct DeviceParams {
  double i_region_width = 565e-4;         // cm
  double junction_area = 5e-5;            // cm^2
  double load_resistance = 1e6;           // ohm
  double effective_permittivity = 1e-12;  // F/cm

  void validate() const;
};

struct DriftCurrent {
  double charge_flux;    // A/cm^2
  double electron_flux;  // electrons cm^-2 s^-1
};

/// Fraction of donors ionized at temperature T, 1/(1 + exp(E_d/kT)).
/// The donor degeneracy factor is deliberately omitted.
double ionized_donor_fraction(double donor_energy_ev, double temperature_k);

/// Complement of ionized_donor_fraction, computed without cancellation.
double occupied_donor_fraction(double donor_energy_ev, double temperature_k);

/// Uniform field across the intrinsic region, V/W.
double field_from_bias(double bias_v, double width_cm);

DriftCurrent drift_current_density(double n, double p, double mu_n, double mu_p,
                                   double field);

/// Electron mobility. Constant mode returns the reference value; power-law
/// mode returns mu_ref*(300/T)^alpha clamped to mobility_max.
double mobility(double temperature_k, double field, const MaterialParams& params);

}  // namespace grosc
