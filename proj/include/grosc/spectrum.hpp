#pragma once

#include <vector>

#include "grosc/time_trace.hpp"

namespace grosc {

enum class Window { kRectangular, kHann };

struct Spectrum {
  std::vector<double> frequency;  // Hz, 0 .. 1/(2 dt)
  std::vector<double> magnitude;  // |X_k| of the (windowed, padded) DFT
  std::vector<double> power;      // |X_k|^2
  double df = 0.0;                // Hz, padded bin spacing
  std::size_t fft_length = 0;     // padded length
  std::size_t signal_length = 0;  // samples before padding
  double dt = 0.0;
};

/// Mean-subtracted, windowed, zero-padded magnitude and power spectrum. The padded
/// length is pad_factor * N rounded up to a power of two.
Spectrum fft_spectrum(const TimeTrace& trace, int pad_factor = 8, Window window = Window::kHann);

}  // namespace grosc
