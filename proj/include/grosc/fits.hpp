#pragma once

#include <limits>

#include "grosc/least_squares.hpp"
#include "grosc/spectrum.hpp"
#include "grosc/time_trace.hpp"

namespace grosc {

struct LorentzianFit {
  bool present = false;  // false: no peak above 3x the median floor in the band
  double amplitude = 0.0;   // A, power-spectrum units above baseline
  double linewidth = 0.0;   // gamma, FWHM in Hz
  double frequency = 0.0;   // f0, Hz
  double baseline = 0.0;
  double floor = 0.0;       // median magnitude in the band
  double residual = 0.0;    // rms misfit / A
};

/// A (g/2)^2 / ((f-f0)^2 + (g/2)^2) + baseline fitted to the power spectrum
/// (squared magnitude when power is empty) around the strongest local maximum
/// in [f_lo, f_hi]. The fit window is f0 +- 4 initial half-widths.
LorentzianFit fit_lorentzian_peak(const Spectrum& spectrum, double f_lo, double f_hi);

struct DampedCosineFit {
  double amplitude = 0.0;  // A0
  double frequency = 0.0;  // Hz
  double decay_time = std::numeric_limits<double>::infinity();  // tau_d, s
  double phase = 0.0;      // rad
  double offset = 0.0;
  bool no_damping = false;
  /// The fitted frequency completes less than one cycle over the trace.
  bool degenerate = false;
  double residual = 0.0;   // rms misfit / rms signal
};

/// offset + A0 exp(-t/tau_d) cos(2 pi f t + phi), t measured from trace.t0.
DampedCosineFit fit_damped_cosine(const TimeTrace& trace, double f_guess);

struct BiexponentialFit {
  double a1 = 0.0;
  double tau1 = 0.0;  // s, tau1 <= tau2
  double a2 = 0.0;
  double tau2 = 0.0;
  double baseline = 0.0;
  bool single = false;  // the one-exponential model won on AIC (a2 = 0)
  double residual = 0.0;
};

/// A1 exp(-t/tau1) + A2 exp(-t/tau2) + baseline, t measured from trace.t0.
BiexponentialFit fit_biexponential(const TimeTrace& decay);

}  // namespace grosc
