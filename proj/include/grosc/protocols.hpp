#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "grosc/gr_dynamics.hpp"
#include "grosc/pulse_sequence.hpp"
#include "grosc/time_trace.hpp"

namespace grosc {

/// Forward pulse of t_high at v_high followed by v_rev for the rest of the period.
PulseSequence build_pulsed_el_sequence(double v_high, double t_high, double v_rev, double period,
                                       int repeat_count = 1);

/// Constant bias with an optical pulse of laser_width at the start of each period.
PulseSequence build_dc_pl_sequence(double v_dc, double laser_power, double laser_width,
                                   double period, int repeat_count = 1);

/// kappa * power, in cm^-3 s^-1.
double optical_generation_rate(double power, double conversion);

struct ReadoutModel {
  double capture_efficiency = 0.1;   // eta
  double capture_coefficient = 1e-9; // c_cap, cm^3/s
  double emitter_density = 1e14;     // N_e, cm^-3
  double fast_lifetime = 522e-9;     // tau_f, s
  double slow_lifetime = 2.39e-6;    // tau_s, s
  double slow_fraction = 0.0;        // beta
  double initial_fast = 0.0;         // N*(0), cm^-3
  double initial_slow = 0.0;         // slow-channel population at t = 0, cm^-3

  void validate() const;
};

/// Photon rate (per cm^3 of emitter volume per second) on the grid of n_trace.
/// Throws DomainError if the grid is coarser than tau_f / 2.
TimeTrace emission_rate(const TimeTrace& n_trace, const ReadoutModel& model);

struct CountTrace {
  double t0 = 0.0;
  double bin_width = 0.0;
  std::vector<std::int64_t> counts;
  std::uint64_t rng_seed = 0;
};

/// Poisson counts with mean equal to the integral of rate over each bin.
CountTrace simulate_photon_counts(const TimeTrace& rate, double bin_width, std::uint64_t seed);

struct BurstNoise {
  double threshold_bias = -5.0;  // V; applied below this bias
  double rate_up = 2e4;          // 1/s, low -> high
  double rate_down = 2e4;        // 1/s, high -> low
  double amplitude = 1e-9;       // A, added in the high state
  std::uint64_t seed = 1;
};

struct IVPoint {
  double bias;     // V
  double current;  // A, mean over the final 20 % of the settle window
  std::optional<TimeTrace> burst;  // superposed telegraph current, when active
};

/// Settles the model at each bias and reports the conduction current.
std::vector<IVPoint> iv_sweep(const std::vector<double>& biases, double temperature,
                              const GRParams& p, double settle_time,
                              const std::optional<BurstNoise>& burst = std::nullopt,
                              double output_dt = 0.0);

/// Two-state Markov telegraph signal taking values {0, amplitude}.
TimeTrace telegraph_trace(double duration, double dt, const BurstNoise& noise, std::uint64_t seed);

}  // namespace grosc
