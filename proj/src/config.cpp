#include "grosc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace grosc {

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&] {
        std::string s = "invalid configuration:";
        for (const auto& e : errs) s += "\n  " + e;
        return s;
      }()),
      errors(std::move(errs)) {}

double SweepConfig::voltage(int i) const {
  return v_count == 1 ? v_start : v_start + (v_stop - v_start) * i / (v_count - 1);
}

double SweepConfig::temperature(int i) const {
  return t_count == 1 ? t_start : t_start + (t_stop - t_start) * i / (t_count - 1);
}

void RunConfig::sync() {
  gr.material = material;
  gr.device = device;
}

namespace {

enum class Rule { kAny, kPositive, kNonNegative, kUnit, kFinite };

struct Field {
  std::string path;
  // Reads the textual value into the config; returns an error message on mismatch.
  std::function<std::optional<std::string>(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  std::function<std::optional<std::string>(const RunConfig&)> check;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) return std::nullopt;
  return v;
}

template <class T>
std::optional<T> to_integer(const std::string& s) {
  T v{};
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) return std::nullopt;
  return v;
}

std::optional<std::string> apply_rule(Rule rule, double v) {
  if (!std::isfinite(v)) return "must be finite";
  switch (rule) {
    case Rule::kPositive:
      if (!(v > 0)) return "must be > 0";
      break;
    case Rule::kNonNegative:
      if (!(v >= 0)) return "must be >= 0";
      break;
    case Rule::kUnit:
      if (!(v >= 0 && v <= 1)) return "must lie in [0, 1]";
      break;
    default:
      break;
  }
  return std::nullopt;
}

using DoubleRef = std::function<double&(RunConfig&)>;

Field real(std::string path, DoubleRef ref, Rule rule) {
  Field f;
  f.path = std::move(path);
  f.set = [ref](RunConfig& c, const std::string& s) -> std::optional<std::string> {
    const auto v = to_double(s);
    if (!v) return "expected a number, got '" + s + "'";
    ref(c) = *v;
    return std::nullopt;
  };
  f.get = [ref](const RunConfig& c) { return fmt_double(ref(const_cast<RunConfig&>(c))); };
  f.check = [ref, rule](const RunConfig& c) { return apply_rule(rule, ref(const_cast<RunConfig&>(c))); };
  return f;
}

Field integer(std::string path, std::function<int&(RunConfig&)> ref, int min_value) {
  Field f;
  f.path = std::move(path);
  f.set = [ref](RunConfig& c, const std::string& s) -> std::optional<std::string> {
    const auto v = to_integer<int>(s);
    if (!v) return "expected an integer, got '" + s + "'";
    ref(c) = *v;
    return std::nullopt;
  };
  f.get = [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); };
  f.check = [ref, min_value](const RunConfig& c) -> std::optional<std::string> {
    if (ref(const_cast<RunConfig&>(c)) < min_value) return "must be >= " + std::to_string(min_value);
    return std::nullopt;
  };
  return f;
}

Field seed(std::string path, std::function<std::uint64_t&(RunConfig&)> ref) {
  Field f;
  f.path = std::move(path);
  f.set = [ref](RunConfig& c, const std::string& s) -> std::optional<std::string> {
    const auto v = to_integer<std::uint64_t>(s);
    if (!v) return "expected an unsigned 64-bit integer, got '" + s + "'";
    ref(c) = *v;
    return std::nullopt;
  };
  f.get = [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); };
  f.check = [](const RunConfig&) { return std::optional<std::string>{}; };
  return f;
}

Field boolean(std::string path, std::function<bool&(RunConfig&)> ref) {
  Field f;
  f.path = std::move(path);
  f.set = [ref](RunConfig& c, const std::string& s) -> std::optional<std::string> {
    if (s == "true") ref(c) = true;
    else if (s == "false") ref(c) = false;
    else return "expected true or false, got '" + s + "'";
    return std::nullopt;
  };
  f.get = [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); };
  f.check = [](const RunConfig&) { return std::optional<std::string>{}; };
  return f;
}

template <class E>
Field choice(std::string path, std::function<E&(RunConfig&)> ref,
             std::vector<std::pair<std::string, E>> names) {
  Field f;
  f.path = std::move(path);
  f.set = [ref, names](RunConfig& c, const std::string& s) -> std::optional<std::string> {
    for (const auto& [n, v] : names) {
      if (n == s) {
        ref(c) = v;
        return std::nullopt;
      }
    }
    std::string msg = "expected one of";
    for (const auto& [n, v] : names) msg += " " + n;
    return msg + ", got '" + s + "'";
  };
  f.get = [ref, names](const RunConfig& c) {
    const E v = ref(const_cast<RunConfig&>(c));
    for (const auto& [n, e] : names) {
      if (e == v) return n;
    }
    return names.front().first;
  };
  f.check = [](const RunConfig&) { return std::optional<std::string>{}; };
  return f;
}

Field text(std::string path, std::function<std::string&(RunConfig&)> ref) {
  Field f;
  f.path = std::move(path);
  f.set = [ref](RunConfig& c, const std::string& s) -> std::optional<std::string> {
    ref(c) = s;
    return std::nullopt;
  };
  f.get = [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); };
  f.check = [ref](const RunConfig& c) -> std::optional<std::string> {
    if (ref(const_cast<RunConfig&>(c)).empty()) return "must not be empty";
    return std::nullopt;
  };
  return f;
}

#define REF(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& registry() {
  static const std::vector<Field> fields = [] {
    using R = Rule;
    std::vector<Field> v;
    // material
    v.push_back(real("material.donor_density", REF(material.donor_density), R::kNonNegative));
    v.push_back(real("material.acceptor_density", REF(material.acceptor_density), R::kNonNegative));
    v.push_back(real("material.donor_energy", REF(material.donor_energy), R::kPositive));
    v.push_back(real("material.acceptor_energy", REF(material.acceptor_energy), R::kPositive));
    v.push_back(real("material.electron_mobility_ref", REF(material.electron_mobility_ref), R::kPositive));
    v.push_back(real("material.hole_mobility_ref", REF(material.hole_mobility_ref), R::kPositive));
    v.push_back(real("material.trap_density", REF(material.trap_density), R::kNonNegative));
    v.push_back(choice<MobilityModel>("material.mobility_model", REF(material.mobility_model),
                                      {{"constant", MobilityModel::kConstant},
                                       {"power_law", MobilityModel::kPowerLaw}}));
    v.push_back(real("material.mobility_exponent", REF(material.mobility_exponent), R::kFinite));
    v.push_back(real("material.mobility_max", REF(material.mobility_max), R::kPositive));
    // device
    v.push_back(real("device.i_region_width", REF(device.i_region_width), R::kPositive));
    v.push_back(real("device.junction_area", REF(device.junction_area), R::kPositive));
    v.push_back(real("device.load_resistance", REF(device.load_resistance), R::kNonNegative));
    v.push_back(real("device.effective_permittivity", REF(device.effective_permittivity), R::kPositive));
    // gr
    v.push_back(real("gr.trap_density", REF(gr.trap_density), R::kPositive));
    v.push_back(real("gr.ionization_prefactor", REF(gr.ionization_prefactor), R::kPositive));
    v.push_back(real("gr.critical_field", REF(gr.critical_field), R::kPositive));
    v.push_back(real("gr.thermal_quench_temperature", REF(gr.thermal_quench_temperature), R::kFinite));
    v.push_back(real("gr.thermal_quench_width", REF(gr.thermal_quench_width), R::kPositive));
    v.push_back(real("gr.capture_coefficient", REF(gr.capture_coefficient), R::kPositive));
    v.push_back(real("gr.thermal_generation_prefactor", REF(gr.thermal_generation_prefactor), R::kNonNegative));
    v.push_back(real("gr.optical_generation", REF(gr.optical_generation), R::kNonNegative));
    v.push_back(real("gr.recombination_rate", REF(gr.recombination_rate), R::kNonNegative));
    v.push_back(real("gr.background_generation", REF(gr.background_generation), R::kNonNegative));
    v.push_back(real("gr.trap_refill_rate", REF(gr.trap_refill_rate), R::kNonNegative));
    v.push_back(real("gr.recombination_saturation", REF(gr.recombination_saturation), R::kNonNegative));
    v.push_back(real("gr.linear_recombination_rate", REF(gr.linear_recombination_rate), R::kNonNegative));
    v.push_back(real("gr.optical_conversion", REF(gr.optical_conversion), R::kNonNegative));
    v.push_back(real("gr.reverse_leakage", REF(gr.reverse_leakage), R::kNonNegative));
    v.push_back(real("gr.field_floor", REF(gr.field_floor), R::kPositive));
    // readout
    v.push_back(real("readout.capture_efficiency", REF(readout.capture_efficiency), R::kUnit));
    v.push_back(real("readout.capture_coefficient", REF(readout.capture_coefficient), R::kNonNegative));
    v.push_back(real("readout.emitter_density", REF(readout.emitter_density), R::kNonNegative));
    v.push_back(real("readout.fast_lifetime", REF(readout.fast_lifetime), R::kPositive));
    v.push_back(real("readout.slow_lifetime", REF(readout.slow_lifetime), R::kPositive));
    v.push_back(real("readout.slow_fraction", REF(readout.slow_fraction), R::kUnit));
    v.push_back(real("readout.initial_fast", REF(readout.initial_fast), R::kNonNegative));
    v.push_back(real("readout.initial_slow", REF(readout.initial_slow), R::kNonNegative));
    // protocol
    v.push_back(choice<ProtocolKind>("protocol.kind", REF(protocol.kind),
                                     {{"pulsed_el", ProtocolKind::kPulsedEl},
                                      {"dc_pl", ProtocolKind::kDcPl},
                                      {"dc", ProtocolKind::kDc}}));
    v.push_back(real("protocol.t_high", REF(protocol.t_high), R::kPositive));
    v.push_back(real("protocol.v_rev", REF(protocol.v_rev), R::kFinite));
    v.push_back(real("protocol.period", REF(protocol.period), R::kPositive));
    v.push_back(integer("protocol.repeat_count", REF(protocol.repeat_count), 1));
    v.push_back(real("protocol.laser_power", REF(protocol.laser_power), R::kNonNegative));
    v.push_back(real("protocol.laser_width", REF(protocol.laser_width), R::kPositive));
    v.push_back(real("protocol.duration", REF(protocol.duration), R::kPositive));
    v.push_back(real("protocol.output_dt", REF(protocol.output_dt), R::kPositive));
    v.push_back(real("protocol.rtol", REF(protocol.rtol), R::kPositive));
    v.push_back(real("protocol.atol", REF(protocol.atol), R::kPositive));
    v.push_back(choice<SignalKind>("protocol.signal", REF(protocol.signal),
                                   {{"current", SignalKind::kCurrent},
                                    {"photon_rate", SignalKind::kPhotonRate}}));
    v.push_back(real("protocol.count_bin_width", REF(protocol.count_bin_width), R::kNonNegative));
    // analysis
    v.push_back(integer("analysis.pad_factor", REF(analysis.pad_factor), 1));
    v.push_back(choice<Window>("analysis.window", REF(analysis.window),
                               {{"hann", Window::kHann}, {"rectangular", Window::kRectangular}}));
    v.push_back(real("analysis.band_low", REF(analysis.band_low), R::kNonNegative));
    v.push_back(real("analysis.band_high", REF(analysis.band_high), R::kPositive));
    v.push_back(real("analysis.min_cycles", REF(analysis.min_cycles), R::kNonNegative));
    v.push_back(real("analysis.transient_skip", REF(analysis.transient_skip), R::kNonNegative));
    v.push_back(real("analysis.early_late_ratio", REF(analysis.early_late_ratio), R::kPositive));
    v.push_back(boolean("analysis.relative", REF(analysis.relative)));
    v.push_back(real("analysis.strength_threshold", REF(analysis.strength_threshold), R::kNonNegative));
    v.push_back(real("analysis.min_modulation", REF(analysis.min_modulation), R::kNonNegative));
    // sweep
    v.push_back(real("sweep.v_start", REF(sweep.v_start), R::kFinite));
    v.push_back(real("sweep.v_stop", REF(sweep.v_stop), R::kFinite));
    v.push_back(integer("sweep.v_count", REF(sweep.v_count), 1));
    v.push_back(real("sweep.t_start", REF(sweep.t_start), R::kPositive));
    v.push_back(real("sweep.t_stop", REF(sweep.t_stop), R::kPositive));
    v.push_back(integer("sweep.t_count", REF(sweep.t_count), 1));
    // burst
    v.push_back(boolean("burst.enabled", REF(burst.enabled)));
    v.push_back(real("burst.threshold_bias", REF(burst.noise.threshold_bias), R::kFinite));
    v.push_back(real("burst.rate_up", REF(burst.noise.rate_up), R::kPositive));
    v.push_back(real("burst.rate_down", REF(burst.noise.rate_down), R::kPositive));
    v.push_back(real("burst.amplitude", REF(burst.noise.amplitude), R::kFinite));
    v.push_back(seed("burst.seed", REF(burst.noise.seed)));
    // run
    v.push_back(seed("run.master_seed", REF(master_seed)));
    v.push_back(text("run.output_directory", REF(output_directory)));
    v.push_back(integer("run.worker_count", REF(worker_count), 1));
    return v;
  }();
  return fields;
}

#undef REF

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> errs;
  for (const auto& f : registry()) {
    if (auto e = f.check(c)) errs.push_back(f.path + ": " + *e);
  }
  const auto& p = c.protocol;
  if (p.rtol < 1e-12 || p.rtol > 1e-2) errs.push_back("protocol.rtol: must lie in [1e-12, 1e-2]");
  if (p.kind == ProtocolKind::kPulsedEl) {
    if (!(p.t_high < p.period)) errs.push_back("protocol.t_high: must be < protocol.period");
    if (!(p.v_rev <= 0)) errs.push_back("protocol.v_rev: must be <= 0");
  }
  if (p.kind == ProtocolKind::kDcPl && !(p.laser_width < p.period)) {
    errs.push_back("protocol.laser_width: must be < protocol.period");
  }
  if (p.signal == SignalKind::kPhotonRate && p.output_dt > c.readout.fast_lifetime / 2) {
    errs.push_back("protocol.output_dt: must be <= readout.fast_lifetime / 2 for photon-rate output");
  }
  if (p.count_bin_width > 0 && p.count_bin_width < p.output_dt) {
    errs.push_back("protocol.count_bin_width: must be >= protocol.output_dt");
  }
  const auto& a = c.analysis;
  if (a.pad_factor > 64) errs.push_back("analysis.pad_factor: must be <= 64");
  if (!(a.band_high > a.band_low)) errs.push_back("analysis.band_high: must exceed analysis.band_low");
  if (!(a.transient_skip < 0.75)) errs.push_back("analysis.transient_skip: must be < 0.75");
  if (c.readout.initial_fast > c.readout.emitter_density) {
    errs.push_back("readout.initial_fast: must be <= readout.emitter_density");
  }
  if (c.readout.initial_slow > c.readout.emitter_density) {
    errs.push_back("readout.initial_slow: must be <= readout.emitter_density");
  }
  if (c.sweep.v_stop < c.sweep.v_start) errs.push_back("sweep.v_stop: must be >= sweep.v_start");
  if (c.sweep.t_stop < c.sweep.t_start) errs.push_back("sweep.t_stop: must be >= sweep.t_start");
  return errs;
}

RunConfig parse_config(const std::string& input) {
  std::map<std::string, const Field*> by_path;
  for (const auto& f : registry()) by_path[f.path] = &f;
  std::set<std::string> sections;
  for (const auto& f : registry()) sections.insert(f.path.substr(0, f.path.find('.')));

  RunConfig c = calibrated_config();
  std::vector<std::string> errs;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(input);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errs.push_back(where + "malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) errs.push_back(where + section + ": unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back(where + "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = key.find('.') == std::string::npos ? section + "." + key : key;
    if (section.empty() && key.find('.') == std::string::npos) {
      errs.push_back(where + key + ": key outside any section");
      continue;
    }
    const auto it = by_path.find(path);
    if (it == by_path.end()) {
      if (sections.count(path.substr(0, path.find('.')))) errs.push_back(where + path + ": unknown key");
      continue;
    }
    if (!seen.insert(path).second) {
      errs.push_back(where + path + ": duplicate key");
      continue;
    }
    if (auto e = it->second->set(c, value)) errs.push_back(where + path + ": " + *e);
  }
  c.sync();
  for (auto& e : validate_config(c)) errs.push_back(std::move(e));
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  std::string section;
  for (const auto& f : registry()) {
    const auto dot = f.path.find('.');
    const std::string s = f.path.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out += "\n";
      out += "[" + s + "]\n";
      section = s;
    }
    out += f.path.substr(dot + 1) + " = " + f.get(c) + "\n";
  }
  return out;
}

}  // namespace grosc
