// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grosc/carrier_statistics.hpp"
#include "grosc/config.hpp"
#include "grosc/fits.hpp"
#include "grosc/gr_dynamics.hpp"
#include "grosc/oscillation.hpp"
#include "grosc/runner.hpp"
#include "grosc/spectrum.hpp"
#include "grosc/stability.hpp"

using namespace grosc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double rms_about_mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  double mean = 0;
  for (std::size_t i = begin; i < end; ++i) mean += v[i];
  mean /= static_cast<double>(end - begin);
  double acc = 0;
  for (std::size_t i = begin; i < end; ++i) acc += (v[i] - mean) * (v[i] - mean);
  return std::sqrt(acc / static_cast<double>(end - begin));
}

// 40-digit oracle values of 1/(1+exp(0.044/(8.617e-5 T))).
constexpr double kOracle[][2] = {
    {10.0, 6.669885311808547583518564e-23},
    {77.0, 0.001316567764520857625502402},
    {300.0, 0.1541961718972212267053371},
};

Outcome arithmetic_chain() {
  const auto t0 = std::chrono::steady_clock::now();
  const double e = field_from_bias(7.0, 0.0565);
  const double flux = drift_current_density(1e-3, 0.0, 1350.0, 480.0, 1.2e2).electron_flux;
  const double dt = seconds_since(t0);
  const double e_dev = std::abs(e - 1.2e2) / 1.2e2;
  const double f_dev = std::abs(flux - 1.6e2) / 1.6e2;
  Outcome o;
  o.pass = std::abs(e - 123.9) < 0.05 && e_dev < 0.04 && std::abs(flux - 162.0) < 0.5 && f_dev < 0.03 &&
           dt < 1.0;
  o.detail = fmt("E=%.4g V/cm (%.2f%% from 1.2e2), flux=%.4g cm^-2 s^-1 (%.2f%% from 1.6e2), %.2e s", e,
                 100 * e_dev, flux, 100 * f_dev, dt);
  return o;
}

Outcome ionization_statistics() {
  double worst = 0;
  for (const auto& row : kOracle) {
    const double got = ionized_donor_fraction(0.044, row[0]);
    worst = std::max(worst, std::abs(got - row[1]) / row[1]);
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ed(1e-3, 0.2);
  std::uniform_real_distribution<double> tt(1.0, 400.0);
  std::uniform_real_distribution<double> step(1.0 + 1e-6, 2.0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double e = ed(rng), t = tt(rng), k = step(rng);
    const double base = ionized_donor_fraction(e, t);
    if (ionized_donor_fraction(e, t * k) < base) ++violations;
    if (ionized_donor_fraction(e * k, t) > base) ++violations;
  }
  Outcome o;
  o.pass = worst <= 1e-10 && violations == 0;
  o.detail = fmt("max relative deviation from oracle %.2e at T={10,77,300} K, %d monotonicity violations in 1000 pairs",
                 worst, violations);
  return o;
}

Outcome conservation() {
  const auto t0 = std::chrono::steady_clock::now();
  GRParams p = calibrated_config().gr;
  p.thermal_generation_prefactor = 0.0;
  p.optical_generation = 0.0;
  p.recombination_rate = 0.0;
  p.linear_recombination_rate = 0.0;
  p.background_generation = 0.0;
  p.trap_refill_rate = 0.0;
  IntegrationOptions opt;
  opt.freeze_field = true;
  opt.temperature = 8.0;
  opt.output_dt = 1e-6;
  const GRState s0{1e8, 0.95, 8.5 / p.device.i_region_width};
  const double window = 1e-3;
  Outcome o;
  try {
    const Trajectory tr = integrate(s0, PulseSequence::constant(8.5, window), window, p, opt);
    const double total0 = s0.n + p.trap_density * s0.f;
    double worst = 0;
    for (std::size_t i = 0; i < tr.n.size(); ++i)
      worst = std::max(worst, std::abs(tr.n.samples[i] + p.trap_density * tr.f.samples[i] - total0) / total0);
    const double moved = std::abs(tr.final_state.f - s0.f);
    const double dt = seconds_since(t0);
    o.pass = worst <= 1e-9 && dt < 10.0 && moved > 1e-3;
    o.detail = fmt("max |d(n+N_t f)|/(n+N_t f) = %.2e over 1 ms (f moved by %.3f), %.2f s", worst, moved, dt);
  } catch (const std::exception& e) {
    o.detail = std::string("integration failed: ") + e.what();
  }
  return o;
}

Outcome integrator_order() {
  // In-island trajectory: leave the unstable focus and grow toward the limit cycle.
  const GRParams p = calibrated_config().gr;
  const double v = 8.5, temp = 8.0;
  const auto fp = tracked_fixed_point(v, temp, p);
  Outcome o;
  if (!fp) {
    o.detail = "no equilibrium at the probe point";
    return o;
  }
  const GRState s0{fp->n * 1.2, fp->f, fp->E};
  const double span = 4e-6;
  auto run = [&](double rtol, long* steps) {
    IntegrationOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-3;
    opt.temperature = temp;
    opt.output_dt = 2e-8;
    const Trajectory tr = integrate(s0, PulseSequence::constant(v, span), span, p, opt);
    if (steps) *steps = tr.stats.accepted;
    return tr;
  };
  const Trajectory ref = run(1e-12, nullptr);
  const double scale = *std::max_element(ref.n.samples.begin(), ref.n.samples.end());
  std::vector<double> err, work;
  for (double rtol : {1e-5, 1e-6, 1e-7, 1e-8}) {
    long steps = 0;
    const Trajectory tr = run(rtol, &steps);
    double e = 0;
    for (std::size_t i = 0; i < tr.n.size(); ++i) e = std::max(e, std::abs(tr.n.samples[i] - ref.n.samples[i]));
    err.push_back(e / scale);
    work.push_back(static_cast<double>(steps));
  }
  // observed order: error ~ steps^(-p), least squares over the three decades
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(err.size());
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double x = std::log(work[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double order = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  bool decreasing = true;
  for (std::size_t i = 1; i < err.size(); ++i) decreasing = decreasing && err[i] < err[i - 1];
  o.pass = order >= 2.0 && decreasing;
  o.detail = fmt("errors %.2e %.2e %.2e %.2e at rtol 1e-5..1e-8 with %g..%g steps, observed order %.2f", err[0],
                 err[1], err[2], err[3], work[0], work[3], order);
  return o;
}

Outcome hopf_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = calibrated_config();
  const GRParams& p = cfg.gr;
  const auto boundary = hopf_boundary(6.75, 10.0, 6.0, 13.0, p, {66, 10});
  std::vector<std::pair<double, double>> inside, outside;  // (V, T)
  // pair the lower and upper crossing on each temperature line
  for (std::size_t i = 0; i + 1 < boundary.size(); ++i) {
    const auto& a = boundary[i];
    const auto& b = boundary[i + 1];
    if (a.temperature != b.temperature || !a.hopf || !b.hopf) continue;
    inside.push_back({a.bias * 1.05, a.temperature});
    inside.push_back({b.bias * 0.95, b.temperature});
    outside.push_back({a.bias * 0.95, a.temperature});
    outside.push_back({b.bias * 1.05, b.temperature});
    ++i;
  }
  const double span = 100e-6;
  auto simulate = [&](double v, double t) {
    const auto fp = tracked_fixed_point(v, t, p);
    if (!fp) throw std::runtime_error("no equilibrium");
    IntegrationOptions opt;
    opt.rtol = cfg.protocol.rtol;
    opt.atol = cfg.protocol.atol;
    opt.output_dt = cfg.protocol.output_dt;
    opt.temperature = t;
    const GRState s0{fp->n * 1.05, fp->f, fp->E};
    return integrate(s0, PulseSequence::constant(v, span), span, p, opt);
  };
  int in_ok = 0, out_ok = 0;
  double worst_in = INFINITY, worst_out = INFINITY;
  for (const auto& [v, t] : inside) {
    const Trajectory tr = simulate(v, t);
    const auto& n = tr.n.samples;
    double mean = 0;
    for (std::size_t i = 3 * n.size() / 4; i < n.size(); ++i) mean += n[i];
    mean /= static_cast<double>(n.size() - 3 * n.size() / 4);
    const double floor = cfg.protocol.rtol * mean + cfg.protocol.atol * p.trap_density;
    const double late = rms_about_mean(n, 3 * n.size() / 4, n.size());
    worst_in = std::min(worst_in, late / floor);
    if (late >= 10.0 * floor) ++in_ok;
  }
  for (const auto& [v, t] : outside) {
    const Trajectory tr = simulate(v, t);
    const auto& n = tr.n.samples;
    const double early = rms_about_mean(n, 0, n.size() / 4);
    const double late = rms_about_mean(n, 3 * n.size() / 4, n.size());
    const double ratio = early / std::max(late, 1e-300);
    worst_out = std::min(worst_out, ratio);
    if (ratio >= 10.0) ++out_ok;
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = inside.size() == 20 && outside.size() == 20 && in_ok == 20 && out_ok == 20 && dt < 300.0;
  o.detail = fmt("%d/%zu inside points oscillate (min late amplitude %.3g x floor), %d/%zu outside points decay "
                 "(min early/late %.3g), %.1f s",
                 in_ok, inside.size(), worst_in, out_ok, outside.size(), worst_out, dt);
  return o;
}

struct SweepRuns {
  SweepResult eight;
  fs::path dir_eight, dir_one;
  double seconds_eight = 0;
  bool one_done = false;
};

Outcome calibration_targets(SweepRuns& runs) {
  const RunConfig cfg = calibrated_config();
  runs.dir_eight = fs::temp_directory_path() / "grosc_acceptance_w8";
  fs::remove_all(runs.dir_eight);
  const auto t0 = std::chrono::steady_clock::now();
  runs.eight = run_sweep(cfg, 8, runs.dir_eight.string());
  runs.seconds_eight = seconds_since(t0);
  const PhaseMap& map = runs.eight.map;
  Outcome o;
  const double dv = (cfg.sweep.v_stop - cfg.sweep.v_start) / (cfg.sweep.v_count - 1);
  const double dtemp = (cfg.sweep.t_stop - cfg.sweep.t_start) / (cfg.sweep.t_count - 1);
  if (!map.island) {
    o.detail = "no stable island";
    return o;
  }
  const auto& box = *map.island;
  const bool box_ok = box.v_min >= 8.0 - dv && box.v_max <= 9.0 + dv && box.t_min >= 6.0 - dtemp &&
                      box.t_max <= 13.0 + dtemp;
  double f_lo = INFINITY, f_hi = 0;
  for (const auto& row : map.cells)
    for (const auto& c : row)
      if (c && c->phase_class == PhaseClass::kStable) {
        f_lo = std::min(f_lo, c->peak_frequency);
        f_hi = std::max(f_hi, c->peak_frequency);
      }
  const bool freq_ok = f_lo >= 1e5 && f_hi <= 1e7;
  const auto fmax = max_frequency_vs_temperature(map);
  bool trend_ok = !fmax.empty();
  for (std::size_t i = 1; i < fmax.size(); ++i)
    trend_ok = trend_ok && fmax[i].max_frequency <= 1.1 * fmax[i - 1].max_frequency;
  o.pass = box_ok && freq_ok && trend_ok && runs.seconds_eight < 900.0 && runs.eight.failed == 0;
  o.detail = fmt("island %.3f-%.3f V x %.2f-%.2f K, stable f0 %.3g-%.3g Hz, f_max over %zu rows %s, "
                 "%zu failed cells, %.1f s",
                 box.v_min, box.v_max, box.t_min, box.t_max, f_lo, f_hi, fmax.size(),
                 trend_ok ? "non-increasing within 10%" : "violates the trend", runs.eight.failed,
                 runs.seconds_eight);
  return o;
}

std::size_t peak_bin(const TimeTrace& tr, double f_lo) {
  const Spectrum s = fft_spectrum(tr, 8, Window::kHann);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.magnitude.size(); ++k)
    if (s.frequency[k] >= f_lo && (best == 0 || s.magnitude[k] > s.magnitude[best])) best = k;
  return best;
}

Outcome current_luminescence() {
  RunConfig cfg = calibrated_config();
  cfg.protocol.signal = SignalKind::kPhotonRate;
  const CellResult cell = simulate_cell(cfg, 8.5, 8.0, 1);
  Outcome o;
  if (!cell.photon_rate || !cell.metrics) {
    o.detail = "no photon-rate trace";
    return o;
  }
  const double begin = cell.analyzed.t0;
  const double end = begin + cell.analyzed.duration();
  const TimeTrace current = cell.current.window(begin, end);
  const TimeTrace photons = cell.photon_rate->window(begin, end);
  const double f_lo = cfg.analysis.min_cycles / current.duration();
  const std::size_t kc = peak_bin(current, f_lo);
  const std::size_t kp = peak_bin(photons, f_lo);
  const Spectrum s = fft_spectrum(current, 8, Window::kHann);
  const long diff = static_cast<long>(kc) - static_cast<long>(kp);
  o.pass = std::labs(diff) <= 1 && cell.metrics->phase_class == PhaseClass::kStable;
  o.detail = fmt("current peak %.6g Hz, photon-rate peak %.6g Hz, %ld padded bins apart (df = %.4g Hz), class %s",
                 s.frequency[kc], s.frequency[kp], diff, s.df, to_string(cell.metrics->phase_class).c_str());
  return o;
}

Outcome analysis_recovery() {
  std::mt19937_64 rng(8);
  // Lorentzian A = 5, gamma = 50 kHz, f0 = 2 MHz with 1 % noise
  Spectrum s;
  s.df = 2e3;
  s.dt = 1e-8;
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int k = 0; k < 4000; ++k) {
    const double f = k * s.df, hw = 25e3;
    s.frequency.push_back(f);
    s.power.push_back(5.0 * hw * hw / ((f - 2e6) * (f - 2e6) + hw * hw) + noise(rng));
    s.magnitude.push_back(std::sqrt(std::abs(s.power.back())));
  }
  const auto lf = fit_lorentzian_peak(s, 1e5, 7e6);
  const double lor_err = std::max({std::abs(lf.amplitude / 5.0 - 1), std::abs(lf.linewidth / 50e3 - 1),
                                   std::abs(lf.frequency / 2e6 - 1)});

  TimeTrace decay;
  decay.dt = 10e-9;
  std::normal_distribution<double> n2(0.0, 0.01 * 6.0);
  for (int i = 0; i < 2000; ++i) {
    const double t = decay.time(i);
    decay.samples.push_back(5.0 * std::exp(-t / 522e-9) + std::exp(-t / 2.39e-6) + n2(rng));
  }
  const auto bf = fit_biexponential(decay);
  const double bi_err = std::max(std::abs(bf.tau1 / 522e-9 - 1), std::abs(bf.tau2 / 2.39e-6 - 1));

  TimeTrace tone;
  tone.dt = 5e-9;
  const double tau = 1.5e-6, f0 = 3e6;
  for (int i = 0; i < static_cast<int>(8 * tau / tone.dt); ++i) {
    const double t = tone.time(i);
    tone.samples.push_back(std::exp(-t / tau) * std::cos(2 * M_PI * f0 * t + 0.3));
  }
  const auto dc = fit_damped_cosine(tone, f0 * 1.02);
  const auto tf = fit_lorentzian_peak(fft_spectrum(tone, 8, Window::kRectangular), 1e5, 2e7);
  const double cross = std::abs(tf.linewidth * M_PI * dc.decay_time - 1);

  Outcome o;
  o.pass = lf.present && lor_err <= 0.05 && !bf.single && bi_err <= 0.03 && tf.present && cross <= 0.15;
  o.detail = fmt("Lorentzian worst error %.2f%%, lifetimes %.1f ns / %.3f us (worst %.2f%%), "
                 "gamma*pi*tau_d - 1 = %.2f%%",
                 100 * lor_err, bf.tau1 * 1e9, bf.tau2 * 1e6, 100 * bi_err, 100 * cross);
  return o;
}

Outcome optical_quenching() {
  RunConfig cfg = calibrated_config();
  const double v = 8.5, temp = 8.0;
  std::vector<double> powers{0.0};
  for (int i = 0; i <= 28; ++i) powers.push_back(1e-6 * std::pow(10.0, i * 0.125));  // 1 uW .. 3.2 mW
  std::vector<double> strength;
  std::vector<PhaseClass> classes;
  for (double pw : powers) {
    RunConfig c = cfg;
    c.gr.optical_generation = optical_generation_rate(pw, cfg.gr.optical_conversion);
    const CellResult cell = simulate_cell(c, v, temp, 1);
    const auto m = cell.metrics.value_or(OscillationMetrics{});
    classes.push_back(m.phase_class);
    strength.push_back(m.phase_class == PhaseClass::kAbsent ? 0.0 : m.strength);
  }
  const std::size_t knee = static_cast<std::size_t>(std::max_element(strength.begin(), strength.end()) -
                                                    strength.begin());
  bool monotone = true;
  for (std::size_t i = knee + 1; i < strength.size(); ++i) monotone = monotone && strength[i] <= strength[i - 1];
  std::size_t first_absent = powers.size();
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == PhaseClass::kAbsent) {
      first_absent = i;
      break;
    }
  bool stays_absent = first_absent < powers.size();
  for (std::size_t i = first_absent; i < classes.size(); ++i) stays_absent = stays_absent && classes[i] == PhaseClass::kAbsent;
  Outcome o;
  o.pass = classes.front() == PhaseClass::kStable && stays_absent && monotone;
  o.detail = fmt("class %s at P=0, knee at %.3g uW, absent from %.3g uW onward, A/gamma %s beyond the knee",
                 to_string(classes.front()).c_str(), powers[knee] * 1e6,
                 first_absent < powers.size() ? powers[first_absent] * 1e6 : NAN,
                 monotone ? "non-increasing" : "not monotone");
  return o;
}

Outcome determinism(SweepRuns& runs) {
  const RunConfig cfg = calibrated_config();
  runs.dir_one = fs::temp_directory_path() / "grosc_acceptance_w1";
  fs::remove_all(runs.dir_one);
  run_sweep(cfg, 1, runs.dir_one.string());
  const bool strength_same = slurp(runs.dir_one / "strength.csv") == slurp(runs.dir_eight / "strength.csv");
  const bool class_same = slurp(runs.dir_one / "class.csv") == slurp(runs.dir_eight / "class.csv");
  const bool nonempty = !slurp(runs.dir_one / "strength.csv").empty();
  Outcome o;
  o.pass = strength_same && class_same && nonempty;
  o.detail = fmt("strength.csv %s, class.csv %s between 1 and 8 workers", strength_same ? "identical" : "differs",
                 class_same ? "identical" : "differs");
  return o;
}

}  // namespace

int main() {
  SweepRuns runs;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"SI arithmetic chain", arithmetic_chain},
      {"ionization statistics", ionization_statistics},
      {"carrier conservation", conservation},
      {"integrator order", integrator_order},
      {"Hopf consistency", hopf_consistency},
      {"calibration targets", [&] { return calibration_targets(runs); }},
      {"current-luminescence frequency agreement", current_luminescence},
      {"analysis recovery", analysis_recovery},
      {"optical quenching", optical_quenching},
      {"determinism", [&] { return determinism(runs); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
