#include "grosc/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "grosc/csv.hpp"
#include "grosc/seeding.hpp"

namespace grosc {

using nlohmann::json;

namespace {

json metrics_json(const OscillationMetrics& m) {
  return json{{"peak_frequency_hz", m.peak_frequency},
              {"amplitude", m.amplitude},
              {"linewidth_hz", m.linewidth},
              {"strength", m.strength},
              {"relative_strength", m.relative_strength},
              {"spectral_floor", m.floor},
              {"tone_amplitude", m.tone_amplitude},
              {"phase_class", to_string(m.phase_class)},
              {"fit_residual", m.fit_residual},
              {"peak_present", m.peak_present}};
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

TimeTrace scaled(const TimeTrace& in, double factor, const char* name, const char* unit) {
  TimeTrace out = in;
  out.name = name;
  out.unit = unit;
  for (double& v : out.samples) v *= factor;
  return out;
}

}  // namespace

PulseSequence protocol_sequence(const ProtocolConfig& pc, double v) {
  switch (pc.kind) {
    case ProtocolKind::kPulsedEl:
      return build_pulsed_el_sequence(v, pc.t_high, pc.v_rev, pc.period, pc.repeat_count);
    case ProtocolKind::kDcPl:
      return build_dc_pl_sequence(v, pc.laser_power, pc.laser_width, pc.period, pc.repeat_count);
    case ProtocolKind::kDc:
      break;
  }
  return PulseSequence({{pc.duration, v, 0.0}}, pc.repeat_count);
}

GRState initial_state(const RunConfig& config, double v, double temperature) {
  const auto& pc = config.protocol;
  double idle = 0.0;
  if (pc.kind == ProtocolKind::kPulsedEl) idle = pc.v_rev;
  if (pc.kind == ProtocolKind::kDcPl) idle = v;
  if (auto s = tracked_fixed_point(idle, temperature, config.gr)) return *s;
  const auto& g = config.gr;
  const double loss = g.recombination_rate + g.linear_recombination_rate;
  return GRState{loss > 0 ? g.background_generation / loss : 0.0, 1.0,
                 idle / g.device.i_region_width};
}

CellResult simulate_cell(const RunConfig& config, double v, double temperature, std::uint64_t seed) {
  CellResult r;
  r.bias = v;
  r.temperature = temperature;
  r.seed = seed;
  const auto& pc = config.protocol;
  const PulseSequence seq = protocol_sequence(pc, v);
  IntegrationOptions opt;
  opt.rtol = pc.rtol;
  opt.atol = pc.atol;
  opt.output_dt = pc.output_dt;
  opt.temperature = temperature;
  const GRState s0 = initial_state(config, v, temperature);
  try {
    r.trajectory = integrate(s0, seq, seq.total_duration(), config.gr, opt);
  } catch (const StiffnessFailure& e) {
    r.solver_failed = true;
    r.error = e.what();
    r.trajectory = e.partial;
  }
  const double area = config.gr.device.junction_area;
  r.current = scaled(r.trajectory.j, area, "current", "A");
  const bool needs_rate = pc.signal == SignalKind::kPhotonRate || pc.count_bin_width > 0;
  const bool fine_grid = pc.output_dt <= 0.5 * config.readout.fast_lifetime;
  if (r.trajectory.n.size() >= 2 && (needs_rate || fine_grid)) {
    r.photon_rate = emission_rate(r.trajectory.n, config.readout);
    if (pc.count_bin_width > 0) r.counts = simulate_photon_counts(*r.photon_rate, pc.count_bin_width, seed);
  }
  if (r.solver_failed) return r;

  const TimeTrace& signal = pc.signal == SignalKind::kPhotonRate ? *r.photon_rate : r.current;
  // Observation window: the forward segment (pulsed EL) or the last period.
  const double total = seq.total_duration();
  double begin = 0.0;
  double end = total;
  if (pc.kind == ProtocolKind::kPulsedEl) {
    begin = total - pc.period;
    end = begin + pc.t_high;
  } else if (pc.kind == ProtocolKind::kDcPl) {
    begin = total - pc.period + pc.laser_width;
  }
  r.analyzed = signal.window(begin - 0.5 * pc.output_dt, end - 0.5 * pc.output_dt);
  if (r.analyzed.size() >= 16) {
    r.metrics = analyze_trace(r.analyzed, config.analysis);
  } else {
    r.error = "observation window holds fewer than 16 samples";
  }
  return r;
}

int run_simulate(const RunConfig& config, double v, double temperature, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const CellResult r = simulate_cell(config, v, temperature, derive_seed(config.master_seed, 0));
  const auto& tr = r.trajectory;
  if (tr.n.size() >= 1) {
    write_traces_csv(out_dir + "/state.csv", {&tr.n, &tr.f, &tr.E});
    write_traces_csv(out_dir + "/current.csv", {&r.current});
    if (r.photon_rate) write_traces_csv(out_dir + "/photon_rate.csv", {&*r.photon_rate});
    if (r.counts) write_counts_csv(out_dir + "/counts.csv", *r.counts);
  }
  json doc{{"schema_version", 1},
           {"bias_v", v},
           {"temperature_k", temperature},
           {"seed", r.seed},
           {"complete", !r.solver_failed},
           {"accepted_steps", tr.stats.accepted},
           {"rejected_steps", tr.stats.rejected}};
  if (r.solver_failed) doc["error"] = r.error;
  if (r.metrics) doc["metrics"] = metrics_json(*r.metrics);
  write_json(out_dir + "/metrics.json", doc);
  return r.solver_failed ? exit_code::kSolverFailure : exit_code::kOk;
}

namespace {

struct SweepRun {
  SweepResult result;
  std::vector<CellResult> cells;
};

SweepRun execute_sweep(const RunConfig& config, int workers) {
  const auto& sw = config.sweep;
  const std::size_t total = static_cast<std::size_t>(sw.v_count) * static_cast<std::size_t>(sw.t_count);
  std::vector<CellResult> cells(total);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const int it = static_cast<int>(i / static_cast<std::size_t>(sw.v_count));
      const int iv = static_cast<int>(i % static_cast<std::size_t>(sw.v_count));
      const double v = sw.voltage(iv);
      const double t = sw.temperature(it);
      try {
        cells[i] = simulate_cell(config, v, t, derive_seed(config.master_seed, i));
      } catch (const std::exception& e) {
        cells[i].bias = v;
        cells[i].temperature = t;
        cells[i].error = e.what();
      }
      // Traces are not kept for the map.
      cells[i].trajectory = Trajectory{};
      cells[i].current = TimeTrace{};
      cells[i].photon_rate.reset();
      cells[i].counts.reset();
      cells[i].analyzed = TimeTrace{};
    }
  };
  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  SweepRun run;
  std::vector<PhaseCell> pc;
  pc.reserve(total);
  for (const auto& c : cells) {
    if (!c.metrics) ++run.result.failed;
    pc.push_back({c.bias, c.temperature, c.metrics});
  }
  run.result.map = build_phase_map(pc);
  const double ok = static_cast<double>(total - run.result.failed) / static_cast<double>(total);
  run.result.exit_code = ok >= 0.9 ? exit_code::kOk : exit_code::kPartialSweep;
  run.cells = std::move(cells);
  return run;
}

}  // namespace

SweepResult run_sweep(const RunConfig& config, int workers) {
  return execute_sweep(config, workers).result;
}

SweepResult run_sweep(const RunConfig& config, int workers, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  SweepRun run = execute_sweep(config, workers);
  const PhaseMap& map = run.result.map;

  json cells = json::array();
  for (const auto& c : run.cells) {
    json j{{"bias_v", c.bias}, {"temperature_k", c.temperature}, {"seed", c.seed}};
    if (c.metrics) j["metrics"] = metrics_json(*c.metrics);
    else j["missing"] = true;
    if (!c.error.empty()) j["error"] = c.error;
    cells.push_back(std::move(j));
  }
  write_json(out_dir + "/cells.json", json{{"schema_version", 1}, {"cells", std::move(cells)}});
  write_strength_csv(out_dir + "/strength.csv", map);
  write_class_csv(out_dir + "/class.csv", map);

  json summary{{"schema_version", 1},
               {"master_seed", config.master_seed},
               {"cells", run.cells.size()},
               {"failed_cells", run.result.failed},
               {"voltages_v", map.voltages},
               {"temperatures_k", map.temperatures}};
  if (map.island) {
    summary["island"] = {{"v_min", map.island->v_min}, {"v_max", map.island->v_max},
                         {"t_min", map.island->t_min}, {"t_max", map.island->t_max}};
  } else {
    summary["island"] = nullptr;
  }
  if (map.max_strength_cell) {
    const auto [r, k] = *map.max_strength_cell;
    summary["max_strength"] = {{"bias_v", map.voltages[k]},
                               {"temperature_k", map.temperatures[r]},
                               {"strength", map.cells[r][k]->strength}};
  }
  json fmax = json::array();
  for (const auto& p : max_frequency_vs_temperature(map)) {
    fmax.push_back({{"temperature_k", p.temperature}, {"max_frequency_hz", p.max_frequency}});
  }
  summary["max_frequency_vs_temperature"] = std::move(fmax);
  write_json(out_dir + "/summary.json", summary);
  return run.result;
}

int run_analyze(const std::vector<std::string>& files, const AnalysisConfig& analysis,
                const std::string& out_dir, std::string* error) {
  std::filesystem::create_directories(out_dir);
  for (const auto& path : files) {
    std::vector<TimeTrace> traces;
    try {
      traces = read_traces_csv(path);
    } catch (const std::exception& e) {
      if (error) *error = path + ": " + e.what();
      return exit_code::kInputError;
    }
    json doc{{"schema_version", 1}, {"source", path}, {"signals", json::object()}};
    for (const auto& tr : traces) {
      doc["signals"][tr.name] = metrics_json(analyze_trace(tr, analysis));
    }
    const std::string stem = std::filesystem::path(path).stem().string();
    write_json(out_dir + "/" + stem + ".metrics.json", doc);
  }
  return exit_code::kOk;
}

std::string estimate_table(const RunConfig& config) {
  const auto& m = config.material;
  const auto& d = config.device;
  std::string out;
  auto row = [&out](const std::string& what, double value, const char* unit) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-48s %14.6g  %s\n", what.c_str(), value, unit);
    out += buf;
  };
  char label[96];
  for (double t : {10.0, 77.0, 300.0}) {
    std::snprintf(label, sizeof label, "ionized donor fraction, E_d=%.0f meV, T=%.0f K", m.donor_energy * 1e3, t);
    row(label, ionized_donor_fraction(m.donor_energy, t), "1");
    std::snprintf(label, sizeof label, "ionized donor density N_d+, T=%.0f K", t);
    row(label, m.donor_density * ionized_donor_fraction(m.donor_energy, t), "cm^-3");
  }
  std::snprintf(label, sizeof label, "field E = V/W, V=7 V, W=%.0f um", d.i_region_width * 1e4);
  row(label, field_from_bias(7.0, d.i_region_width), "V/cm");
  const DriftCurrent j = drift_current_density(1e-3, 0.0, m.electron_mobility_ref, m.hole_mobility_ref, 1.2e2);
  std::snprintf(label, sizeof label, "electron flux, n=1e-3 cm^-3, mu_n=%.0f, E=120 V/cm", m.electron_mobility_ref);
  row(label, j.electron_flux, "cm^-2 s^-1");
  row("charge flux, same inputs", j.charge_flux, "A/cm^2");
  return out;
}

}  // namespace grosc
