#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grosc/fits.hpp"
#include "grosc/spectrum.hpp"
#include "grosc/time_trace.hpp"

namespace grosc {

enum class PhaseClass { kStable, kDamped, kAbsent };

std::string to_string(PhaseClass c);
PhaseClass phase_class_from_string(const std::string& s);

struct OscillationMetrics {
  double peak_frequency = 0.0;  // Hz
  double amplitude = 0.0;       // spectrum units
  double linewidth = 0.0;       // Hz, FWHM
  double strength = 0.0;        // amplitude / linewidth
  double relative_strength = 0.0;
  double floor = 0.0;           // median spectral power in the band
  double tone_amplitude = 0.0;  // signal units, sinusoid amplitude implied by the peak
  PhaseClass phase_class = PhaseClass::kAbsent;
  double fit_residual = 0.0;
  bool peak_present = false;
};

struct AnalysisConfig {
  int pad_factor = 8;
  Window window = Window::kHann;
  double band_low = 1e4;    // Hz
  double band_high = 5e7;   // Hz, clipped to the Nyquist frequency
  /// Frequencies completing fewer cycles than this over the analyzed window
  /// are excluded from the peak search.
  double min_cycles = 3.0;
  double transient_skip = 0.1;
  double early_late_ratio = 0.8;
  /// Relative mode compares (A/floor) * (resolution/gamma) against
  /// strength_threshold, which is invariant under amplitude scaling.
  /// Absolute mode compares A/gamma directly.
  bool relative = true;
  double strength_threshold = 100.0;
  /// Window RMS, or the tone amplitude implied by the peak, below this
  /// fraction of |mean| counts as no oscillation.
  double min_modulation = 1e-6;

  void validate() const;
};

/// Drops the transient, computes the padded spectrum and fits the peak.
/// The class is left absent; see classify_oscillation.
OscillationMetrics spectral_metrics(const TimeTrace& trace, const AnalysisConfig& config);

/// Late/early RMS ratio after the transient skip: final 25 % versus the first
/// 25 % of the remaining window.
double late_early_ratio(const TimeTrace& trace, double transient_skip);

PhaseClass classify_oscillation(const OscillationMetrics& metrics, const TimeTrace& trace,
                                const AnalysisConfig& config);

/// spectral_metrics followed by classify_oscillation.
OscillationMetrics analyze_trace(const TimeTrace& trace, const AnalysisConfig& config);

}  // namespace grosc
