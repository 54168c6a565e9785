#include "grosc/fits.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <numbers>
#include <vector>

namespace grosc {

namespace {

constexpr double kPi = std::numbers::pi;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

double lorentz(double f, double a, double g, double f0, double b) {
  const double hw = 0.5 * g;
  return a * hw * hw / ((f - f0) * (f - f0) + hw * hw) + b;
}

}  // namespace

LorentzianFit fit_lorentzian_peak(const Spectrum& s, double f_lo, double f_hi) {
  LorentzianFit fit;
  if (s.frequency.empty()) return fit;
  const double f_top = s.frequency.back();
  if (!(f_hi > f_lo) || f_lo < 0 || f_lo > f_top) {
    throw std::invalid_argument("search band outside spectrum range");
  }
  std::size_t lo = 0;
  while (lo < s.frequency.size() && s.frequency[lo] < f_lo) ++lo;
  std::size_t hi = lo;
  while (hi + 1 < s.frequency.size() && s.frequency[hi + 1] <= f_hi) ++hi;
  if (hi <= lo + 2) return fit;

  std::vector<double> y = s.power;
  if (y.empty()) {
    y.reserve(s.magnitude.size());
    for (double m : s.magnitude) y.push_back(m * m);
  }

  std::vector<double> band(y.begin() + static_cast<std::ptrdiff_t>(lo),
                           y.begin() + static_cast<std::ptrdiff_t>(hi + 1));
  fit.floor = median(band);

  std::size_t peak = 0;
  double best = -1.0;
  for (std::size_t k = std::max<std::size_t>(lo, 1); k <= hi && k + 1 < y.size(); ++k) {
    const double v = y[k];
    if (v > y[k - 1] && v >= y[k + 1] && v > best) {
      best = v;
      peak = k;
    }
  }
  if (peak == 0 || !(best > 3.0 * fit.floor) || best <= 0) return fit;

  // Initial guesses from the half-maximum crossings.
  const double base0 = fit.floor;
  const double a0 = best - base0;
  const double half = base0 + 0.5 * a0;
  // Half-maximum crossings inside the band; a peak that never falls to half
  // height before the band edge sits on a sloping background and is not resolved.
  auto crossing = [&](int dir) -> std::optional<double> {
    std::size_t k = peak;
    while (true) {
      if ((dir < 0 && k <= lo) || (dir > 0 && k >= hi)) return std::nullopt;
      const std::size_t next = dir > 0 ? k + 1 : k - 1;
      if (y[next] <= half) {
        const double m0 = y[k];
        const double m1 = y[next];
        const double t = (m0 - half) / std::max(m0 - m1, 1e-300);
        return s.frequency[k] + t * (s.frequency[next] - s.frequency[k]);
      }
      k = next;
    }
  };
  const auto left = crossing(-1);
  const auto right = crossing(+1);
  if (!left || !right) return fit;
  const double fl = *left;
  const double fr = *right;
  const double g0 = std::max(fr - fl, s.df);
  const double f0 = s.frequency[peak];

  const double w_lo = std::max(f0 - 4.0 * g0, s.frequency[lo]);
  const double w_hi = std::min(f0 + 4.0 * g0, s.frequency[hi]);
  std::vector<double> fx;
  std::vector<double> fy;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (s.frequency[k] >= w_lo && s.frequency[k] <= w_hi) {
      fx.push_back(s.frequency[k]);
      fy.push_back(y[k]);
    }
  }
  if (fx.size() < 6) {
    // Very narrow peak: take a minimum number of bins around it.
    const std::size_t pad = 3;
    fx.clear();
    fy.clear();
    const std::size_t last = std::min(peak + pad, y.size() - 1);
    for (std::size_t k = peak >= pad ? peak - pad : 0; k <= last; ++k) {
      fx.push_back(s.frequency[k]);
      fy.push_back(y[k]);
    }
  }

  const double scale = best;
  const ResidualFn resid = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(fx.size()));
    for (std::size_t i = 0; i < fx.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = (lorentz(fx[i], x[0] * scale, x[1] * g0, f0 + x[2] * g0, x[3] * scale) - fy[i]) / scale;
    }
    return r;
  };
  Eigen::VectorXd x0(4);
  x0 << a0 / scale, 1.0, 0.0, base0 / scale;
  Eigen::VectorXd lower(4);
  Eigen::VectorXd upper(4);
  lower << 0.0, 1e-3, (w_lo - f0) / g0, 0.0;
  upper << 100.0, 100.0, (w_hi - f0) / g0, 1.0;
  const LMResult lm = levenberg_marquardt(resid, x0, lower, upper);

  fit.present = true;
  fit.amplitude = lm.x[0] * scale;
  fit.linewidth = lm.x[1] * g0;
  fit.frequency = f0 + lm.x[2] * g0;
  fit.baseline = lm.x[3] * scale;
  fit.residual = std::sqrt(lm.cost / static_cast<double>(fx.size())) * scale /
                 std::max(fit.amplitude, 1e-300);
  if (!(fit.amplitude > 0) || !(fit.linewidth > 0)) fit.present = false;
  return fit;
}

DampedCosineFit fit_damped_cosine(const TimeTrace& trace, double f_guess) {
  trace.validate();
  const std::size_t n = trace.size();
  const double span = trace.dt * static_cast<double>(n - 1);
  if (!(f_guess > 0) || f_guess * span < 3.0) {
    throw std::invalid_argument("trace must span at least 3 periods of f_guess");
  }
  double mean = 0.0;
  for (double v : trace.samples) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : trace.samples) var += (v - mean) * (v - mean);
  const double rms = std::sqrt(var / static_cast<double>(n));
  if (rms == 0.0) throw FitFailure("constant trace has no oscillation", 0.0);

  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = trace.dt * static_cast<double>(i);

  // Linear sub-problem at fixed (f, k): offset, cos and sin amplitudes.
  auto linear = [&](double f, double k, Eigen::Vector3d* coef) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-k * t[i]);
      const auto ii = static_cast<Eigen::Index>(i);
      a(ii, 0) = 1.0;
      a(ii, 1) = e * std::cos(2 * kPi * f * t[i]);
      a(ii, 2) = e * std::sin(2 * kPi * f * t[i]);
      y[ii] = trace.samples[i];
    }
    *coef = a.colPivHouseholderQr().solve(y);
    return (a * *coef - y).squaredNorm();
  };

  // Coarse grid for the nonlinear parameters.
  double best_cost = INFINITY;
  double f_init = f_guess;
  double k_init = 0.0;
  for (int i = -20; i <= 20; ++i) {
    const double f = f_guess * (1.0 + 0.015 * i);
    for (double kk : {0.0, 0.3, 1.0, 3.0, 10.0, 30.0}) {
      Eigen::Vector3d c;
      const double cost = linear(f, kk / span, &c);
      if (cost < best_cost) {
        best_cost = cost;
        f_init = f;
        k_init = kk / span;
      }
    }
  }
  Eigen::Vector3d c;
  linear(f_init, k_init, &c);
  const double amp0 = std::hypot(c[1], c[2]);
  const double phi0 = std::atan2(-c[2], c[1]);

  // x = (offset/rms, A/rms, f/f_guess, k*span, phase)
  const ResidualFn resid = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    const double f = x[2] * f_guess;
    const double k = x[3] / span;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = x[0] * rms + x[1] * rms * std::exp(-k * t[i]) * std::cos(2 * kPi * f * t[i] + x[4]);
      r[static_cast<Eigen::Index>(i)] = (m - trace.samples[i]) / rms;
    }
    return r;
  };
  Eigen::VectorXd x0(5);
  x0 << c[0] / rms, amp0 / rms, f_init / f_guess, k_init * span, phi0;
  Eigen::VectorXd lower(5);
  Eigen::VectorXd upper(5);
  lower << -1e12, 0.0, 1e-6, 0.0, -4 * kPi;
  upper << 1e12, 1e6, 1e3, 1e4, 4 * kPi;
  const LMResult lm = levenberg_marquardt(resid, x0, lower, upper);
  const double rel_res = std::sqrt(lm.cost / static_cast<double>(n));
  if (!lm.converged) throw FitFailure("damped-cosine fit did not converge", rel_res);

  DampedCosineFit fit;
  fit.offset = lm.x[0] * rms;
  fit.amplitude = lm.x[1] * rms;
  fit.frequency = lm.x[2] * f_guess;
  fit.phase = std::remainder(lm.x[4], 2 * kPi);
  fit.residual = rel_res;
  const double k = lm.x[3] / span;
  fit.no_damping = lm.x[3] < 1e-3;
  fit.decay_time = fit.no_damping ? std::numeric_limits<double>::infinity() : 1.0 / k;
  fit.degenerate = fit.frequency * span < 1.0;
  return fit;
}

namespace {

struct ExpModel {
  std::vector<double> taus;
  Eigen::VectorXd coef;  // amplitudes then baseline
  double rss = INFINITY;
};

ExpModel solve_amplitudes(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& taus) {
  const auto n = static_cast<Eigen::Index>(t.size());
  const auto m = static_cast<Eigen::Index>(taus.size());
  Eigen::MatrixXd a(n, m + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = std::exp(-t[static_cast<std::size_t>(i)] / taus[static_cast<std::size_t>(j)]);
    a(i, m) = 1.0;
    b[i] = y[static_cast<std::size_t>(i)];
  }
  ExpModel out;
  out.taus = taus;
  out.coef = a.colPivHouseholderQr().solve(b);
  out.rss = (a * out.coef - b).squaredNorm();
  if (!out.coef.allFinite()) out.rss = INFINITY;
  return out;
}

// Variable projection: LM over log-lifetimes, amplitudes by linear least squares.
ExpModel fit_exponentials(const std::vector<double>& t, const std::vector<double>& y,
                          std::vector<double> tau0, double tau_min, double tau_max, double yscale) {
  const auto m = static_cast<Eigen::Index>(tau0.size());
  const ResidualFn resid = [&](const Eigen::VectorXd& x) {
    std::vector<double> taus(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) taus[static_cast<std::size_t>(j)] = std::exp(x[j]);
    const ExpModel e = solve_amplitudes(t, y, taus);
    Eigen::VectorXd r(static_cast<Eigen::Index>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i) {
      double v = e.coef[m];
      for (Eigen::Index j = 0; j < m; ++j) v += e.coef[j] * std::exp(-t[i] / taus[static_cast<std::size_t>(j)]);
      r[static_cast<Eigen::Index>(i)] = (v - y[i]) / yscale;
    }
    return r;
  };
  Eigen::VectorXd x0(m);
  Eigen::VectorXd lower(m);
  Eigen::VectorXd upper(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    x0[j] = std::log(tau0[static_cast<std::size_t>(j)]);
    lower[j] = std::log(tau_min);
    upper[j] = std::log(tau_max);
  }
  const LMResult lm = levenberg_marquardt(resid, x0, lower, upper);
  std::vector<double> taus(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) taus[static_cast<std::size_t>(j)] = std::exp(lm.x[j]);
  ExpModel out = solve_amplitudes(t, y, taus);
  if (!lm.converged) out.rss = INFINITY;
  return out;
}

}  // namespace

BiexponentialFit fit_biexponential(const TimeTrace& decay) {
  decay.validate();
  const std::size_t n = decay.size();
  if (n < 8) throw std::invalid_argument("bi-exponential fit needs at least 8 samples");
  std::vector<double> t(n);
  std::vector<double> y(decay.samples);
  for (std::size_t i = 0; i < n; ++i) t[i] = decay.dt * static_cast<double>(i);
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  const double range = *mx - *mn;
  if (!(range > 0)) throw FitFailure("flat decay trace", 0.0);
  const double span = t.back();
  const double tau_min = 0.5 * decay.dt;
  const double tau_max = 20.0 * span;

  // Single exponential: grid start then refine.
  ExpModel single;
  for (int i = 0; i <= 40; ++i) {
    const double tau = tau_min * std::pow(tau_max / tau_min, i / 40.0);
    ExpModel e = solve_amplitudes(t, y, {tau});
    if (e.rss < single.rss) single = e;
  }
  single = fit_exponentials(t, y, single.taus, tau_min, tau_max, range);

  ExpModel dbl;
  for (int i = 0; i <= 24; ++i) {
    for (int j = i + 2; j <= 24; ++j) {
      const double t1 = tau_min * std::pow(tau_max / tau_min, i / 24.0);
      const double t2 = tau_min * std::pow(tau_max / tau_min, j / 24.0);
      ExpModel e = solve_amplitudes(t, y, {t1, t2});
      if (e.rss < dbl.rss) dbl = e;
    }
  }
  if (std::isfinite(dbl.rss)) dbl = fit_exponentials(t, y, dbl.taus, tau_min, tau_max, range);
  if (!std::isfinite(single.rss) && !std::isfinite(dbl.rss)) {
    throw FitFailure("exponential fit did not converge", INFINITY);
  }

  const double nn = static_cast<double>(n);
  auto aic = [&](double rss, int k) { return nn * std::log(std::max(rss, 1e-300) / nn) + 2.0 * k; };
  // AIC is meaningless once one term already fits to rounding level
  const bool single_exact = std::sqrt(single.rss / nn) <= 1e-9 * range;
  bool use_double = std::isfinite(dbl.rss) && !single_exact && aic(dbl.rss, 5) < aic(single.rss, 3);
  if (use_double) {
    // Degenerate lifetimes give cancelling amplitudes; fall back to one term.
    if (std::abs(dbl.coef[0]) > 10 * range || std::abs(dbl.coef[1]) > 10 * range ||
        std::abs(std::log(dbl.taus[1] / dbl.taus[0])) < 1e-3) {
      use_double = false;
    }
  }

  BiexponentialFit fit;
  if (use_double) {
    std::size_t i1 = dbl.taus[0] <= dbl.taus[1] ? 0 : 1;
    std::size_t i2 = 1 - i1;
    fit.a1 = dbl.coef[static_cast<Eigen::Index>(i1)];
    fit.tau1 = dbl.taus[i1];
    fit.a2 = dbl.coef[static_cast<Eigen::Index>(i2)];
    fit.tau2 = dbl.taus[i2];
    fit.baseline = dbl.coef[2];
    fit.residual = std::sqrt(dbl.rss / nn) / range;
  } else {
    if (!std::isfinite(single.rss)) throw FitFailure("exponential fit did not converge", INFINITY);
    fit.single = true;
    fit.a1 = single.coef[0];
    fit.tau1 = single.taus[0];
    fit.a2 = 0.0;
    fit.tau2 = single.taus[0];
    fit.baseline = single.coef[1];
    fit.residual = std::sqrt(single.rss / nn) / range;
  }
  return fit;
}

}  // namespace grosc
