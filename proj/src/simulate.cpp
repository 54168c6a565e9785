#include <cmath>

#include "grosc/gr_dynamics.hpp"

namespace grosc {

StiffnessFailure::StiffnessFailure(double t, GRState last, Trajectory partial_trace)
    : std::runtime_error("stiffness failure: step size below 1e-18 s at t=" + std::to_string(t)),
      t_fail(t), last_state(last), partial(std::move(partial_trace)) {}

namespace {

TimeTrace make_trace(double dt, const char* name, const char* unit, std::size_t reserve) {
  TimeTrace tr;
  tr.t0 = 0.0;
  tr.dt = dt;
  tr.name = name;
  tr.unit = unit;
  tr.samples.reserve(reserve);
  return tr;
}

}  // namespace

Trajectory integrate(const GRState& s0, const PulseSequence& sequence, double t_span,
                     const GRParams& p, const IntegrationOptions& options) {
  if (!(options.rtol >= 1e-12 && options.rtol <= 1e-2)) throw DomainError("rtol must lie in [1e-12, 1e-2]");
  if (!(options.atol > 0)) throw DomainError("atol must be > 0");
  if (!(options.output_dt > 0)) throw DomainError("output_dt must be > 0");
  if (!(t_span > 0)) throw DomainError("t_span must be > 0");
  if (!(s0.n >= 0) || !(s0.f >= 0 && s0.f <= 1) || !std::isfinite(s0.E)) {
    throw DomainError("initial state violates n >= 0, 0 <= f <= 1");
  }
  if (sequence.segments().empty()) throw DomainError("pulse sequence is empty");
  p.validate();

  const double temperature = options.temperature;
  const ScaledModel model(p, temperature);
  const double tau = model.time_scale();

  StepControl control;
  control.rtol = options.rtol;
  control.atol = options.atol;
  control.h_min = 1e-18 / tau;
  control.lower = {0.0, 0.0, -1e300};
  control.upper = {1e300, 1.0, 1e300};
  RosenbrockSolver solver(control);

  const auto n_out = static_cast<std::size_t>(std::floor(t_span / options.output_dt + 1e-9)) + 1;
  Trajectory out;
  out.n = make_trace(options.output_dt, "n", "cm-3", n_out);
  out.f = make_trace(options.output_dt, "f", "1", n_out);
  out.E = make_trace(options.output_dt, "E", "V_per_cm", n_out);
  out.j = make_trace(options.output_dt, "j", "A_per_cm2", n_out);

  auto record = [&](const Vec3& y) {
    const GRState s = model.from_scaled(y);
    out.n.samples.push_back(s.n);
    out.f.samples.push_back(s.f);
    out.E.samples.push_back(s.E);
    out.j.samples.push_back(conduction_current(s, temperature, p));
  };

  // Segment edges over the whole span, repeating the program as needed.
  std::vector<std::pair<double, const PulseSegment*>> edges;
  {
    double t = 0.0;
    while (t < t_span) {
      for (const auto& seg : sequence.segments()) {
        if (t >= t_span) break;
        edges.emplace_back(t, &seg);
        t += seg.duration;
      }
    }
  }

  Vec3 y = model.to_scaled(s0);
  std::size_t next_sample = 0;
  const bool slaved = p.device.load_resistance == 0.0;

  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double ta = edges[k].first;
    const double tb = k + 1 < edges.size() ? edges[k + 1].first : t_span;
    const PulseSegment& seg = *edges[k].second;
    const Drive drive{seg.bias, seg.optical_power};
    if (slaved) y[2] = seg.bias / p.device.i_region_width / p.critical_field;
    if (next_sample == 0 && ta == 0.0) {
      record(y);
      next_sample = 1;
    }
    const Rhs3 f = [&](const Vec3& v) { return model.rhs(v, drive, options.freeze_field); };
    const StepObserver observer = [&](double t0, const Vec3& y0, const Vec3& f0, double t1,
                                      const Vec3& y1, const Vec3& f1) {
      while (next_sample < n_out) {
        const double ts = static_cast<double>(next_sample) * options.output_dt / tau;
        if (ts > t1) break;
        record(hermite(ts, t0, y0, f0, t1, y1, f1));
        ++next_sample;
      }
    };
    solver.reset_step();
    try {
      y = solver.advance(f, y, ta / tau, tb / tau, observer);
    } catch (const StepSizeUnderflow& e) {
      out.complete = false;
      out.stats = solver.stats();
      out.final_state = model.from_scaled(e.y_last);
      throw StiffnessFailure(e.t_last * tau, out.final_state, std::move(out));
    }
  }
  // Grid points lying within rounding of t_span.
  while (next_sample < n_out) {
    record(y);
    ++next_sample;
  }
  out.final_state = model.from_scaled(y);
  out.stats = solver.stats();
  return out;
}

}  // namespace grosc
