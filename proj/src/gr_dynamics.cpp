#include "grosc/gr_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace grosc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

double sigmoid_quench(double temperature, const GRParams& p) {
  const double x = (temperature - p.thermal_quench_temperature) / p.thermal_quench_width;
  if (x > 700) return 0.0;
  return 1.0 / (1.0 + std::exp(x));
}

bool slaved_field(const GRParams& p) { return p.device.load_resistance == 0.0; }

// Field on the load line for a given electron density.
double circuit_field(double n, double bias, double temperature, const GRParams& p) {
  const auto& d = p.device;
  if (slaved_field(p)) return bias / d.i_region_width;
  const double q = constants::kElementaryCharge;
  const double mu = mobility(temperature, bias / d.i_region_width, p.material);
  const double g_load = 1.0 / (d.load_resistance * d.junction_area);
  if (bias >= 0) return bias / (d.i_region_width + q * mu * n / g_load);
  // Reverse bias: conduction magnitude is capped at the leakage value.
  const double e_free = bias / (d.i_region_width + q * mu * n / g_load);
  if (q * mu * n * std::abs(e_free) <= p.reverse_leakage) return e_free;
  return (bias + p.reverse_leakage / g_load) / d.i_region_width;
}

}  // namespace

void GRParams::validate() const {
  require(trap_density > 0, "gr.trap_density must be > 0");
  require(ionization_prefactor > 0, "gr.ionization_prefactor must be > 0");
  require(critical_field > 0, "gr.critical_field must be > 0");
  require(thermal_quench_width > 0, "gr.thermal_quench_width must be > 0");
  require(std::isfinite(thermal_quench_temperature), "gr.thermal_quench_temperature must be finite");
  require(capture_coefficient > 0, "gr.capture_coefficient must be > 0");
  require(recombination_rate >= 0, "gr.recombination_rate must be >= 0");
  require(thermal_generation_prefactor >= 0, "gr.thermal_generation_prefactor must be >= 0");
  require(optical_generation >= 0, "gr.optical_generation must be >= 0");
  require(background_generation >= 0, "gr.background_generation must be >= 0");
  require(trap_refill_rate >= 0, "gr.trap_refill_rate must be >= 0");
  require(recombination_saturation >= 0, "gr.recombination_saturation must be >= 0");
  require(linear_recombination_rate >= 0, "gr.linear_recombination_rate must be >= 0");
  require(optical_conversion >= 0, "gr.optical_conversion must be >= 0");
  require(reverse_leakage >= 0, "gr.reverse_leakage must be >= 0");
  require(field_floor > 0, "gr.field_floor must be > 0");
  material.validate();
  device.validate();
}

double impact_ionization_coefficient(double field, double temperature, const GRParams& p) {
  require(temperature > 0, "temperature must be > 0");
  if (field <= 0) return 0.0;
  const double e = std::max(field, p.field_floor);
  return p.ionization_prefactor * std::exp(-p.critical_field / e) *
         sigmoid_quench(temperature, p);
}

double control_parameter(double field, double temperature, double occupied_trap_density,
                         const GRParams& p) {
  return impact_ionization_coefficient(field, temperature, p) * occupied_trap_density -
         p.recombination_rate;
}

double thermal_generation(double f, double temperature, const GRParams& p) {
  if (p.thermal_generation_prefactor == 0.0) return 0.0;
  const double x = p.material.donor_energy / (constants::kBoltzmannEv * temperature);
  return p.thermal_generation_prefactor * p.trap_density * f * std::exp(-x);
}

double recombination(double n, const GRParams& p) {
  const double linear = p.linear_recombination_rate * n;
  if (p.recombination_saturation <= 0) return p.recombination_rate * n + linear;
  return p.recombination_rate * n / (1.0 + std::abs(n) / p.recombination_saturation) + linear;
}

double conduction_current(const GRState& s, double temperature, const GRParams& p) {
  const double q = constants::kElementaryCharge;
  const double j = q * mobility(temperature, s.E, p.material) * s.n * s.E;
  if (s.E > 0) return j;
  return -std::min(std::abs(j), p.reverse_leakage);
}

GRState rhs(const GRState& s, const Drive& drive, double temperature, const GRParams& p) {
  const double nt = p.trap_density;
  const double ci = impact_ionization_coefficient(s.E, temperature, p);
  const double tc = p.capture_coefficient;
  const double g_opt = p.optical_generation + p.optical_conversion * drive.optical_power;
  const double generation = thermal_generation(s.f, temperature, p) + p.background_generation + g_opt;

  GRState d;
  d.n = generation + ci * s.n * nt * s.f - tc * s.n * nt * (1.0 - s.f) - recombination(s.n, p);
  d.f = -ci * s.n * s.f + tc * s.n * (1.0 - s.f) + p.trap_refill_rate * (1.0 - s.f);
  if (slaved_field(p)) {
    d.E = 0.0;
  } else {
    const auto& dev = p.device;
    const double supply = (drive.bias - s.E * dev.i_region_width) /
                          (dev.load_resistance * dev.junction_area);
    d.E = (supply - conduction_current(s, temperature, p)) / dev.effective_permittivity;
  }
  return d;
}

ScaledModel::ScaledModel(const GRParams& p, double temperature)
    : p_(p), temperature_(temperature) {
  // l = 0 is allowed (closed carrier system); fall back to the capture rate
  double rate = p.recombination_rate;
  if (rate <= 0) rate = p.linear_recombination_rate;
  if (rate <= 0) rate = p.capture_coefficient * p.trap_density;
  time_scale_ = 1.0 / rate;
}

Vec3 ScaledModel::to_scaled(const GRState& s) const {
  return {s.n / p_.trap_density, s.f, s.E / p_.critical_field};
}

GRState ScaledModel::from_scaled(const Vec3& y) const {
  return {y[0] * p_.trap_density, y[1], y[2] * p_.critical_field};
}

Vec3 ScaledModel::rhs(const Vec3& y, const Drive& drive, bool freeze_field) const {
  const GRState d = grosc::rhs(from_scaled(y), drive, temperature_, p_);
  Vec3 out = to_scaled(d) * time_scale_;
  if (freeze_field) out[2] = 0.0;
  return out;
}

Matrix3 jacobian(const GRState& s, const Drive& drive, double temperature, const GRParams& p) {
  const ScaledModel model(p, temperature);
  const Vec3 y = model.to_scaled(s);
  Matrix3 jac;
  for (int j = 0; j < 3; ++j) {
    const double h = std::max(std::abs(y[j]) * 1e-6, 1e-12);
    Vec3 yp = y;
    Vec3 ym = y;
    yp[j] += h;
    ym[j] -= h;
    jac.col(j) = (model.rhs(yp, drive) - model.rhs(ym, drive)) / (2 * h);
  }
  return jac / model.time_scale();
}

double scaled_residual(const GRState& s, const Drive& drive, double temperature,
                       const GRParams& p) {
  const ScaledModel model(p, temperature);
  return model.rhs(model.to_scaled(s), drive).norm();
}

namespace {

// Occupancy that balances trap exchange for a given n and field.
double balanced_occupancy(double n, double field, double temperature, const GRParams& p) {
  const double ci = impact_ionization_coefficient(field, temperature, p);
  const double tc = p.capture_coefficient;
  const double r = p.trap_refill_rate;
  const double den = (ci + tc) * n + r;
  if (den <= 0) return 1.0;
  return (tc * n + r) / den;
}

GRState reduced_state(double n, double bias, double temperature, const GRParams& p) {
  const double e = circuit_field(n, bias, temperature, p);
  return {n, balanced_occupancy(n, e, temperature, p), e};
}

// Damped Newton in scaled variables; returns nullopt when it fails to settle.
std::optional<Vec3> newton(const ScaledModel& model, const Drive& drive, Vec3 y,
                           bool slaved) {
  auto residual = [&](const Vec3& v) { return model.rhs(v, drive); };
  Vec3 r = residual(y);
  for (int iter = 0; iter < 80; ++iter) {
    Mat3 jac;
    for (int j = 0; j < 3; ++j) {
      const double h = std::max(std::abs(y[j]) * 1e-7, 1e-14);
      Vec3 yp = y;
      Vec3 ym = y;
      yp[j] += h;
      ym[j] -= h;
      jac.col(j) = (residual(yp) - residual(ym)) / (2 * h);
    }
    if (slaved) {
      jac.row(2).setZero();
      jac.col(2).setZero();
      jac(2, 2) = 1.0;
    }
    Vec3 step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) return std::nullopt;
    double lambda = 1.0;
    const double r0 = r.norm();
    Vec3 trial;
    Vec3 rt;
    for (int ls = 0; ls < 40; ++ls) {
      trial = y + lambda * step;
      trial[0] = std::max(trial[0], 0.0);
      trial[1] = std::clamp(trial[1], 0.0, 1.0);
      rt = residual(trial);
      if (rt.allFinite() && rt.norm() < (1 - 1e-4 * lambda) * r0) break;
      lambda *= 0.5;
    }
    const double change = (trial - y).cwiseAbs().cwiseQuotient(
        (y.cwiseAbs().array() + 1e-30).matrix()).maxCoeff();
    y = trial;
    r = rt;
    if (change < 1e-13 || r.norm() == 0.0) return y;
  }
  return y;
}

}  // namespace

FixedPointResult fixed_points(double bias, double temperature, const GRParams& p,
                              double optical_power) {
  FixedPointResult result;
  const Drive drive{bias, optical_power};
  const ScaledModel model(p, temperature);
  const double g_total = p.background_generation + p.optical_generation +
                         p.optical_conversion * optical_power;
  const bool no_sources = g_total == 0.0 && p.thermal_generation_prefactor == 0.0;

  if (no_sources && bias == 0.0 && p.trap_refill_rate == 0.0) {
    result.occupancy_family = true;
    return result;
  }

  std::vector<Vec3> seeds;
  // Bracket sign changes of the reduced balance dn/dt(n) along the load line.
  const double nt = p.trap_density;
  double prev_n = 0.0;
  double prev_g = 0.0;
  bool have_prev = false;
  for (int k = 0; k <= 240; ++k) {
    const double n = nt * std::pow(10.0, -30.0 + 34.0 * k / 240.0);
    const GRState s = reduced_state(n, bias, temperature, p);
    const double g = rhs(s, drive, temperature, p).n;
    if (have_prev && std::signbit(g) != std::signbit(prev_g)) {
      double lo = prev_n;
      double hi = n;
      double glo = prev_g;
      for (int it = 0; it < 200 && hi / lo - 1 > 1e-15; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double gm = rhs(reduced_state(mid, bias, temperature, p), drive, temperature, p).n;
        if (std::signbit(gm) == std::signbit(glo)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      seeds.push_back(model.to_scaled(reduced_state(std::sqrt(lo * hi), bias, temperature, p)));
    }
    prev_n = n;
    prev_g = g;
    have_prev = true;
  }
  // n = 0 is an equilibrium only without sources.
  if (no_sources) seeds.push_back(model.to_scaled(reduced_state(0.0, bias, temperature, p)));
  // Multi-start grid.
  for (int k = 0; k <= 8; ++k) {
    const double n = nt * std::pow(10.0, -16.0 + 2.0 * k);
    for (double f0 : {1e-3, 0.1, 0.5, 0.9, 0.999}) {
      const double e = circuit_field(n, bias, temperature, p);
      seeds.push_back(model.to_scaled({n, f0, e}));
    }
  }

  const bool slaved = slaved_field(p);
  std::vector<Vec3> roots;
  for (const auto& seed : seeds) {
    auto y = newton(model, drive, seed, slaved);
    if (!y) continue;
    if ((*y)[0] < 0 || (*y)[1] < 0 || (*y)[1] > 1) continue;
    if (model.rhs(*y, drive).norm() > 1e-8) continue;
    bool dup = false;
    for (const auto& r : roots) {
      const Vec3 diff = (r - *y).cwiseAbs();
      const Vec3 scale = (r.cwiseAbs() + y->cwiseAbs()) * 0.5;
      bool same = true;
      for (int i = 0; i < 3; ++i) {
        if (diff[i] > 1e-6 * scale[i] + 1e-300) same = false;
      }
      if (same) {
        dup = true;
        break;
      }
    }
    if (!dup) roots.push_back(*y);
  }
  std::sort(roots.begin(), roots.end(), [](const Vec3& a, const Vec3& b) { return a[0] > b[0]; });
  for (const auto& r : roots) result.points.push_back(model.from_scaled(r));
  return result;
}

std::optional<GRState> tracked_fixed_point(double bias, double temperature, const GRParams& p,
                                           double optical_power) {
  const auto fp = fixed_points(bias, temperature, p, optical_power);
  if (fp.points.empty()) return std::nullopt;
  return fp.points.front();
}

}  // namespace grosc
