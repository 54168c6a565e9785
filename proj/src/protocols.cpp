#include "grosc/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "grosc/seeding.hpp"

namespace grosc {

PulseSequence build_pulsed_el_sequence(double v_high, double t_high, double v_rev, double period,
                                       int repeat_count) {
  if (!(t_high > 0 && t_high < period)) throw DomainError("pulsed EL needs 0 < t_high < period");
  if (!(v_rev <= 0)) throw DomainError("pulsed EL needs v_rev <= 0");
  return PulseSequence({{t_high, v_high, 0.0}, {period - t_high, v_rev, 0.0}}, repeat_count);
}

PulseSequence build_dc_pl_sequence(double v_dc, double laser_power, double laser_width,
                                   double period, int repeat_count) {
  if (!(laser_width > 0 && laser_width < period)) {
    throw DomainError("DC PL needs 0 < laser_width < period");
  }
  if (!(laser_power >= 0)) throw DomainError("laser_power must be >= 0");
  return PulseSequence({{laser_width, v_dc, laser_power}, {period - laser_width, v_dc, 0.0}},
                       repeat_count);
}

double optical_generation_rate(double power, double conversion) {
  if (!(power >= 0)) throw DomainError("optical power must be >= 0");
  return conversion * power;
}

void ReadoutModel::validate() const {
  if (!(capture_efficiency >= 0 && capture_efficiency <= 1)) {
    throw DomainError("readout.capture_efficiency must lie in [0, 1]");
  }
  if (!(capture_coefficient >= 0)) throw DomainError("readout.capture_coefficient must be >= 0");
  if (!(emitter_density >= 0)) throw DomainError("readout.emitter_density must be >= 0");
  if (!(fast_lifetime > 0)) throw DomainError("readout.fast_lifetime must be > 0");
  if (!(slow_lifetime > 0)) throw DomainError("readout.slow_lifetime must be > 0");
  if (!(slow_fraction >= 0 && slow_fraction <= 1)) {
    throw DomainError("readout.slow_fraction must lie in [0, 1]");
  }
  if (!(initial_fast >= 0 && initial_fast <= emitter_density) ||
      !(initial_slow >= 0 && initial_slow <= emitter_density)) {
    throw DomainError("readout initial populations must lie in [0, emitter_density]");
  }
}

TimeTrace emission_rate(const TimeTrace& n_trace, const ReadoutModel& m) {
  n_trace.validate();
  m.validate();
  const double dt = n_trace.dt;
  if (dt > m.fast_lifetime / 2) throw DomainError("trace dt exceeds fast_lifetime / 2; resample finer");

  double n_max = 0.0;
  for (double v : n_trace.samples) n_max = std::max(n_max, v);
  const double fastest = m.capture_coefficient * n_max + 1.0 / std::min(m.fast_lifetime, m.slow_lifetime);
  const double h_cap = std::min(m.fast_lifetime / 20.0, 0.2 / fastest);
  const int sub = std::max(1, static_cast<int>(std::ceil(dt / h_cap)));
  const double h = dt / sub;

  auto deriv = [&](double n, double pop, double tau) {
    return m.capture_coefficient * std::max(n, 0.0) * (m.emitter_density - pop) - pop / tau;
  };

  TimeTrace out;
  out.t0 = n_trace.t0;
  out.dt = dt;
  out.name = "photon_rate";
  out.unit = "per_cm3_s";
  out.samples.resize(n_trace.size());
  double fast = m.initial_fast;
  double slow = m.initial_slow;
  auto rate = [&] {
    return m.capture_efficiency * fast / m.fast_lifetime + m.slow_fraction * slow / m.slow_lifetime;
  };
  out.samples[0] = rate();
  for (std::size_t i = 1; i < n_trace.size(); ++i) {
    const double na = n_trace.samples[i - 1];
    const double nb = n_trace.samples[i];
    for (int k = 0; k < sub; ++k) {
      const double n0 = na + (nb - na) * k / sub;
      const double n1 = na + (nb - na) * (k + 1) / sub;
      // Heun: explicit trapezoidal predictor-corrector.
      const double kf0 = deriv(n0, fast, m.fast_lifetime);
      const double ks0 = deriv(n0, slow, m.slow_lifetime);
      const double fp = fast + h * kf0;
      const double sp = slow + h * ks0;
      fast += 0.5 * h * (kf0 + deriv(n1, fp, m.fast_lifetime));
      slow += 0.5 * h * (ks0 + deriv(n1, sp, m.slow_lifetime));
      fast = std::clamp(fast, 0.0, m.emitter_density);
      slow = std::clamp(slow, 0.0, m.emitter_density);
    }
    out.samples[i] = rate();
  }
  return out;
}

CountTrace simulate_photon_counts(const TimeTrace& rate, double bin_width, std::uint64_t seed) {
  rate.validate();
  if (!(bin_width >= rate.dt * (1 - 1e-12))) throw DomainError("bin_width must be >= trace dt");
  for (double r : rate.samples) {
    if (!(r >= 0)) throw DomainError("photon rate must be non-negative");
  }
  // Cumulative trapezoid integral at the samples.
  std::vector<double> cum(rate.size(), 0.0);
  for (std::size_t i = 1; i < rate.size(); ++i) {
    cum[i] = cum[i - 1] + 0.5 * rate.dt * (rate.samples[i - 1] + rate.samples[i]);
  }
  const double span = rate.dt * static_cast<double>(rate.size() - 1);
  auto integral_to = [&](double t) {
    const double x = std::clamp(t / rate.dt, 0.0, static_cast<double>(rate.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(x), rate.size() - 2);
    const double s = x - static_cast<double>(i);
    const double r0 = rate.samples[i];
    const double r1 = rate.samples[i + 1];
    return cum[i] + rate.dt * (r0 * s + 0.5 * (r1 - r0) * s * s);
  };

  CountTrace out;
  out.t0 = rate.t0;
  out.bin_width = bin_width;
  out.rng_seed = seed;
  const auto bins = static_cast<std::size_t>(std::floor(span / bin_width * (1 + 1e-12)));
  out.counts.resize(bins);
  std::mt19937_64 rng(seed);
  for (std::size_t b = 0; b < bins; ++b) {
    const double mean = std::max(0.0, integral_to((b + 1) * bin_width) - integral_to(b * bin_width));
    if (mean <= 0) continue;
    std::poisson_distribution<std::int64_t> dist(mean);
    out.counts[b] = dist(rng);
  }
  return out;
}

TimeTrace telegraph_trace(double duration, double dt, const BurstNoise& noise, std::uint64_t seed) {
  if (!(dt > 0) || !(duration > 0)) throw DomainError("telegraph trace needs dt, duration > 0");
  if (!(noise.rate_up > 0) || !(noise.rate_down > 0)) throw DomainError("burst rates must be > 0");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> up(noise.rate_up);
  std::exponential_distribution<double> down(noise.rate_down);
  TimeTrace out;
  out.dt = dt;
  out.name = "burst";
  out.unit = "A";
  const auto n = static_cast<std::size_t>(std::floor(duration / dt)) + 1;
  out.samples.resize(n);
  bool high = false;
  double next_switch = up(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    while (t >= next_switch) {
      high = !high;
      next_switch += high ? down(rng) : up(rng);
    }
    out.samples[i] = high ? noise.amplitude : 0.0;
  }
  return out;
}

std::vector<IVPoint> iv_sweep(const std::vector<double>& biases, double temperature,
                              const GRParams& p, double settle_time,
                              const std::optional<BurstNoise>& burst, double output_dt) {
  if (!(settle_time > 0)) throw DomainError("settle_time must be > 0");
  p.validate();
  const double dt = output_dt > 0 ? output_dt : settle_time / 2000.0;
  std::vector<IVPoint> out;
  out.reserve(biases.size());
  for (std::size_t k = 0; k < biases.size(); ++k) {
    const double v = biases[k];
    const double loss = p.recombination_rate + p.linear_recombination_rate;
    const GRState s0{loss > 0 ? p.background_generation / loss : 0.0, 1.0,
                     v / p.device.i_region_width};
    IntegrationOptions opt;
    opt.output_dt = dt;
    opt.temperature = temperature;
    const Trajectory tr = integrate(s0, PulseSequence::constant(v, settle_time), settle_time, p, opt);
    const TimeTrace tail = tr.j.slice(0.8, 1.0);
    double mean = 0.0;
    for (double x : tail.samples) mean += x;
    mean /= static_cast<double>(tail.size());
    IVPoint pt{v, mean * p.device.junction_area, std::nullopt};
    if (burst && v < burst->threshold_bias) {
      TimeTrace tele = telegraph_trace(settle_time, dt, *burst, derive_seed(burst->seed, k));
      const TimeTrace tele_tail = tele.slice(0.8, 1.0);
      double add = 0.0;
      for (double x : tele_tail.samples) add += x;
      pt.current += add / static_cast<double>(tele_tail.size());
      pt.burst = std::move(tele);
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace grosc
