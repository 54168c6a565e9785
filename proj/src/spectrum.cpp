#include "grosc/spectrum.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace grosc {

namespace {
// FFTW planning is not thread-safe; execution is.
std::mutex planner_mutex;
}  // namespace

Spectrum fft_spectrum(const TimeTrace& trace, int pad_factor, Window window) {
  trace.validate();
  if (trace.size() < 8) throw std::invalid_argument("fft_spectrum needs at least 8 samples");
  if (pad_factor < 1 || pad_factor > 64) throw std::invalid_argument("pad_factor must lie in [1, 64]");

  const std::size_t n = trace.size();
  const std::size_t m = std::bit_ceil(n * static_cast<std::size_t>(pad_factor));
  const std::size_t bins = m / 2 + 1;

  double mean = 0.0;
  for (double v : trace.samples) mean += v;
  mean /= static_cast<double>(n);

  double* in = fftw_alloc_real(m);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < m; ++i) in[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::kHann) {
      w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(n - 1));
    }
    in[i] = (trace.samples[i] - mean) * w;
  }
  fftw_execute(plan);

  Spectrum s;
  s.fft_length = m;
  s.signal_length = n;
  s.dt = trace.dt;
  s.df = 1.0 / (static_cast<double>(m) * trace.dt);
  s.frequency.resize(bins);
  s.magnitude.resize(bins);
  s.power.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    s.frequency[k] = static_cast<double>(k) * s.df;
    s.magnitude[k] = std::hypot(out[k][0], out[k][1]);
    s.power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

}  // namespace grosc
