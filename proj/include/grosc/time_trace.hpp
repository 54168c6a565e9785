#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace grosc {

/// Uniformly sampled scalar signal. Sample i sits at t0 + i*dt.
struct TimeTrace {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> samples;
  std::string name = "signal";
  std::string unit = "arb";

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double duration() const { return dt * static_cast<double>(samples.size()); }

  /// Throws std::invalid_argument unless dt > 0 and at least two samples exist.
  void validate() const;

  /// Samples with time in [t_begin, t_end).
  TimeTrace window(double t_begin, double t_end) const;
  /// Fractional window, e.g. slice(0.5, 1.0) is the second half.
  TimeTrace slice(double begin_fraction, double end_fraction) const;
};

}  // namespace grosc
