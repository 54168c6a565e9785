#include "grosc/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grosc {

std::string to_string(PhaseClass c) {
  switch (c) {
    case PhaseClass::kStable: return "stable";
    case PhaseClass::kDamped: return "damped";
    case PhaseClass::kAbsent: return "absent";
  }
  return "absent";
}

PhaseClass phase_class_from_string(const std::string& s) {
  if (s == "stable") return PhaseClass::kStable;
  if (s == "damped") return PhaseClass::kDamped;
  if (s == "absent") return PhaseClass::kAbsent;
  throw std::invalid_argument("unknown phase class: " + s);
}

void AnalysisConfig::validate() const {
  if (pad_factor < 1 || pad_factor > 64) throw std::invalid_argument("analysis.pad_factor must lie in [1, 64]");
  if (!(band_low >= 0) || !(band_high > band_low)) throw std::invalid_argument("analysis band must satisfy 0 <= low < high");
  if (!(transient_skip >= 0 && transient_skip < 0.75)) throw std::invalid_argument("analysis.transient_skip must lie in [0, 0.75)");
  if (!(min_cycles >= 0)) throw std::invalid_argument("analysis.min_cycles must be >= 0");
  if (!(early_late_ratio > 0)) throw std::invalid_argument("analysis.early_late_ratio must be > 0");
  if (!(strength_threshold >= 0)) throw std::invalid_argument("analysis.strength_threshold must be >= 0");
  if (!(min_modulation >= 0)) throw std::invalid_argument("analysis.min_modulation must be >= 0");
}

namespace {

double window_rms(const std::vector<double>& v, std::size_t a, std::size_t b) {
  if (b <= a) return 0.0;
  double mean = 0.0;
  for (std::size_t i = a; i < b; ++i) mean += v[i];
  mean /= static_cast<double>(b - a);
  double s = 0.0;
  for (std::size_t i = a; i < b; ++i) s += (v[i] - mean) * (v[i] - mean);
  return std::sqrt(s / static_cast<double>(b - a));
}

}  // namespace

OscillationMetrics spectral_metrics(const TimeTrace& trace, const AnalysisConfig& config) {
  trace.validate();
  const TimeTrace kept = trace.slice(config.transient_skip, 1.0);
  const Spectrum s = fft_spectrum(kept, config.pad_factor, config.window);
  OscillationMetrics m;
  const double nyquist = s.frequency.back();
  const double hi = std::min(config.band_high, nyquist);
  const double lo = std::max(config.band_low, config.min_cycles / kept.duration());
  if (!(hi > lo)) return m;
  const LorentzianFit fit = fit_lorentzian_peak(s, lo, hi);
  m.floor = fit.floor;
  if (!fit.present) return m;
  m.peak_present = true;
  m.peak_frequency = fit.frequency;
  m.amplitude = fit.amplitude;
  m.linewidth = fit.linewidth;
  m.strength = fit.amplitude / fit.linewidth;
  m.fit_residual = fit.residual;
  const double resolution = 1.0 / (static_cast<double>(kept.size()) * kept.dt);
  m.relative_strength = fit.floor > 0 ? fit.amplitude / fit.floor * resolution / fit.linewidth
                                      : INFINITY;
  // coherent gain: a tone of amplitude a peaks at a * sum(w) / 2
  double gain = 0.0;
  const std::size_t n = kept.size();
  for (std::size_t i = 0; i < n; ++i) {
    gain += config.window == Window::kHann
                ? 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n - 1))
                : 1.0;
  }
  m.tone_amplitude = 2.0 * std::sqrt(fit.amplitude) / gain;
  return m;
}

double late_early_ratio(const TimeTrace& trace, double transient_skip) {
  const auto& v = trace.samples;
  const std::size_t n = v.size();
  const auto start = static_cast<std::size_t>(std::floor(transient_skip * static_cast<double>(n)));
  const std::size_t q_early = (n - start) / 4;
  const std::size_t q_late = n / 4;
  const double early = window_rms(v, start, start + q_early);
  const double late = window_rms(v, n - q_late, n);
  if (early == 0.0) return late == 0.0 ? 1.0 : INFINITY;
  return late / early;
}

PhaseClass classify_oscillation(const OscillationMetrics& m, const TimeTrace& trace,
                                const AnalysisConfig& config) {
  if (!m.peak_present) return PhaseClass::kAbsent;
  const TimeTrace kept = trace.slice(config.transient_skip, 1.0);
  double mean = 0.0;
  for (double x : kept.samples) mean += x;
  mean /= static_cast<double>(kept.size());
  const double rms = window_rms(kept.samples, 0, kept.size());
  if (rms <= config.min_modulation * std::abs(mean)) return PhaseClass::kAbsent;
  if (m.tone_amplitude <= config.min_modulation * std::abs(mean)) return PhaseClass::kAbsent;
  const double s = config.relative ? m.relative_strength : m.strength;
  if (!(s > config.strength_threshold)) return PhaseClass::kAbsent;
  return late_early_ratio(trace, config.transient_skip) >= config.early_late_ratio
             ? PhaseClass::kStable
             : PhaseClass::kDamped;
}

OscillationMetrics analyze_trace(const TimeTrace& trace, const AnalysisConfig& config) {
  OscillationMetrics m = spectral_metrics(trace, config);
  m.phase_class = classify_oscillation(m, trace, config);
  return m;
}

}  // namespace grosc
