#pragma once

#include <vector>

namespace grosc {

struct PulseSegment {
  double duration;       // s
  double bias;           // V
  double optical_power;  // W
};

/// Piecewise-constant bias and optical-power program, repeated
/// repeat_count times.
class PulseSequence {
 public:
  PulseSequence() = default;
  PulseSequence(std::vector<PulseSegment> segments, int repeat_count = 1);

  static PulseSequence constant(double bias, double duration, double optical_power = 0.0);

  const std::vector<PulseSegment>& segments() const { return segments_; }
  int repeat_count() const { return repeat_count_; }
  void set_repeat_count(int count);
  double period() const { return period_; }
  double total_duration() const { return period_ * repeat_count_; }

  /// Segment active at time t (t folded into one period). Segment edges
  /// belong to the segment that starts there.
  const PulseSegment& at(double t) const;

  /// Absolute start times of every segment over all repetitions, plus the
  /// final end time.
  std::vector<double> boundaries() const;

 private:
  std::vector<PulseSegment> segments_;
  int repeat_count_ = 1;
  double period_ = 0.0;
};

}  // namespace grosc
