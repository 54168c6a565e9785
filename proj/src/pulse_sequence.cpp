#include "grosc/pulse_sequence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace grosc {

PulseSequence::PulseSequence(std::vector<PulseSegment> segments, int repeat_count)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("pulse sequence needs at least one segment");
  for (const auto& s : segments_) {
    if (!(s.duration > 0) || !std::isfinite(s.duration))
      throw std::invalid_argument("pulse segment duration must be > 0");
    if (!std::isfinite(s.bias)) throw std::invalid_argument("pulse segment bias must be finite");
    if (!(s.optical_power >= 0)) throw std::invalid_argument("optical power must be >= 0");
    period_ += s.duration;
  }
  set_repeat_count(repeat_count);
}

PulseSequence PulseSequence::constant(double bias, double duration, double optical_power) {
  return PulseSequence({{duration, bias, optical_power}}, 1);
}

void PulseSequence::set_repeat_count(int count) {
  if (count < 1) throw std::invalid_argument("repeat_count must be >= 1");
  repeat_count_ = count;
}

const PulseSegment& PulseSequence::at(double t) const {
  double local = std::fmod(t, period_);
  if (local < 0) local += period_;
  double edge = 0.0;
  for (const auto& s : segments_) {
    edge += s.duration;
    if (local < edge) return s;
  }
  return segments_.back();
}

std::vector<double> PulseSequence::boundaries() const {
  std::vector<double> out;
  out.reserve(segments_.size() * repeat_count_ + 1);
  double t = 0.0;
  for (int r = 0; r < repeat_count_; ++r) {
    for (const auto& s : segments_) {
      out.push_back(t);
      t += s.duration;
    }
  }
  out.push_back(t);
  return out;
}

}  // namespace grosc
