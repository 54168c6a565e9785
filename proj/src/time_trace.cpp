#include "grosc/time_trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grosc {

void TimeTrace::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("trace dt must be > 0");
  if (samples.size() < 2) throw std::invalid_argument("trace needs at least two samples");
}

TimeTrace TimeTrace::window(double t_begin, double t_end) const {
  TimeTrace out = *this;
  out.samples.clear();
  bool first = true;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = time(i);
    if (t < t_begin || t >= t_end) continue;
    if (first) {
      out.t0 = t;
      first = false;
    }
    out.samples.push_back(samples[i]);
  }
  return out;
}

TimeTrace TimeTrace::slice(double begin_fraction, double end_fraction) const {
  const auto n = static_cast<double>(samples.size());
  const auto b = static_cast<std::size_t>(std::clamp(std::floor(begin_fraction * n), 0.0, n));
  const auto e = static_cast<std::size_t>(std::clamp(std::floor(end_fraction * n), 0.0, n));
  TimeTrace out = *this;
  out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(b),
                     samples.begin() + static_cast<std::ptrdiff_t>(std::max(b, e)));
  out.t0 = time(b);
  return out;
}

}  // namespace grosc
