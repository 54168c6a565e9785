#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "grosc/carrier_statistics.hpp"
#include "grosc/integrator.hpp"
#include "grosc/pulse_sequence.hpp"
#include "grosc/time_trace.hpp"

namespace grosc {

/// Parameters of the lumped generation-recombination model.
///
/// Carrier balance (n free electrons, f occupied-trap fraction, E field):
///
///   dn/dt = g_th + g_bg + g_opt + C_i n N_t f - T_c n N_t (1-f) - R(n)
///   df/dt = -C_i n f + T_c n (1-f) + r (1-f)
///   dE/dt = [ (V - E W)/(R_L A) - j_cond ] / eps_eff
///
/// with C_i = X0 exp(-E_c/E) / (1 + exp((T-T_q)/dT)), g_th = g_th0 N_t f
/// exp(-E_d/kT), R(n) = l n / (1 + n/n_sat) + l_lin n and j_cond = q mu n E.
/// Setting trap_refill_rate = 0 and recombination_saturation = 0 reduces the
/// model to the plain impact-ionization/capture/recombination balance, which
/// has a strictly stable equilibrium; the refill and the saturable
/// recombination channel are what open the oscillatory window.
struct GRParams {
  double trap_density = 1e12;                  // N_t, cm^-3
  double ionization_prefactor = 1e-5;          // X0, cm^3/s
  double critical_field = 100.0;               // E_c, V/cm
  double thermal_quench_temperature = 12.5;    // T_q, K
  double thermal_quench_width = 0.5;           // dT, K
  double capture_coefficient = 1e-6;           // T_c, cm^3/s
  double thermal_generation_prefactor = 0.0;   // g_th0, 1/s
  double optical_generation = 0.0;             // g_opt, cm^-3 s^-1 (CW)
  double recombination_rate = 1e6;             // l, 1/s

  double background_generation = 0.0;          // g_bg, cm^-3 s^-1
  double trap_refill_rate = 0.0;               // r, 1/s
  double recombination_saturation = 0.0;       // n_sat, cm^-3 (0: linear)
  double linear_recombination_rate = 0.0;      // l_lin, 1/s, non-saturating channel
  double optical_conversion = 1e18;            // kappa, cm^-3 s^-1 per W
  double reverse_leakage = 1e-9;               // A/cm^2, |j_cond| cap for E <= 0
  double field_floor = 1e-6;                   // V/cm, lower clamp inside exp(-E_c/E)

  MaterialParams material;
  DeviceParams device;

  void validate() const;
};

struct GRState {
  double n = 0.0;  // cm^-3
  double f = 1.0;  // occupied trap fraction
  double E = 0.0;  // V/cm
};

/// Instantaneous drive: bias across diode plus load, and optical power.
struct Drive {
  double bias = 0.0;           // V
  double optical_power = 0.0;  // W
};

double impact_ionization_coefficient(double field, double temperature, const GRParams& p);

/// Net per-electron autocatalytic growth rate C_i * n_occupied - l (1/s).
double control_parameter(double field, double temperature, double occupied_trap_density,
                         const GRParams& p);

double thermal_generation(double f, double temperature, const GRParams& p);
double recombination(double n, const GRParams& p);
/// Conduction current density (A/cm^2), clamped to the leakage value for E <= 0.
double conduction_current(const GRState& s, double temperature, const GRParams& p);

GRState rhs(const GRState& s, const Drive& drive, double temperature, const GRParams& p);

/// Nondimensional form: y = (n/N_t, f, E/E_c), time in units of time_scale.
class ScaledModel {
 public:
  ScaledModel(const GRParams& p, double temperature);

  Vec3 to_scaled(const GRState& s) const;
  GRState from_scaled(const Vec3& y) const;
  /// dy/dtau with tau = t / time_scale.
  Vec3 rhs(const Vec3& y, const Drive& drive, bool freeze_field = false) const;
  double time_scale() const { return time_scale_; }

 private:
  const GRParams& p_;
  double temperature_;
  double time_scale_;
};

using Matrix3 = Mat3;

/// Central-difference Jacobian in scaled state variables and physical time,
/// so every entry is in 1/s and the spectrum equals that of the physical system.
Matrix3 jacobian(const GRState& s, const Drive& drive, double temperature, const GRParams& p);

/// Scaled residual norm |dy/dt| * time_scale used for equilibrium acceptance.
double scaled_residual(const GRState& s, const Drive& drive, double temperature,
                       const GRParams& p);

struct FixedPointResult {
  std::vector<GRState> points;  // sorted by decreasing n
  /// Dark, unbiased, refill-free case: n = 0 with arbitrary f is stationary.
  bool occupancy_family = false;
  bool no_equilibrium() const { return points.empty() && !occupancy_family; }
};

FixedPointResult fixed_points(double bias, double temperature, const GRParams& p,
                              double optical_power = 0.0);

/// Conducting branch: the equilibrium with the largest n.
std::optional<GRState> tracked_fixed_point(double bias, double temperature, const GRParams& p,
                                           double optical_power = 0.0);

struct IntegrationOptions {
  double rtol = 1e-6;
  double atol = 1e-9;            // scaled units
  double output_dt = 1e-8;       // s
  bool freeze_field = false;
  double temperature = 10.0;     // K
};

struct Trajectory {
  TimeTrace n;  // cm^-3
  TimeTrace f;
  TimeTrace E;  // V/cm
  TimeTrace j;  // A/cm^2, conduction current density
  GRState final_state;
  StepStats stats;
  bool complete = true;
};

/// Step size fell below 1e-18 s. Carries the trace up to the failure.
class StiffnessFailure : public std::runtime_error {
 public:
  StiffnessFailure(double t, GRState last, Trajectory partial);
  double t_fail;
  GRState last_state;
  Trajectory partial;
};

/// Integrates from s0 over [0, t_span] under the given drive program. Segment
/// edges of the sequence are step boundaries. Output is resampled on a uniform
/// grid with spacing options.output_dt starting at t = 0.
Trajectory integrate(const GRState& s0, const PulseSequence& sequence, double t_span,
                     const GRParams& p, const IntegrationOptions& options);

}  // namespace grosc
