#include "grosc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace grosc {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_number(const std::string& s, int line) {
  const std::string t = trim(s);
  if (t.empty()) throw CsvError("empty field", line);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw CsvError("not a number: '" + t + "'", line);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::string column_label(const TimeTrace& trace) {
  return trace.unit.empty() ? trace.name : trace.name + "_" + trace.unit;
}

void write_traces_csv(std::ostream& out, const std::vector<const TimeTrace*>& traces) {
  if (traces.empty()) throw std::invalid_argument("no traces to write");
  const TimeTrace& first = *traces.front();
  for (const auto* t : traces) {
    if (t->size() != first.size() || t->dt != first.dt || t->t0 != first.t0) {
      throw std::invalid_argument("traces written together must share one time grid");
    }
  }
  out << "# columns: time_s";
  for (const auto* t : traces) out << ',' << column_label(*t);
  out << "\n# t0_s = " << exact(first.t0) << "\n# dt_s = " << exact(first.dt) << "\n";
  for (std::size_t i = 0; i < first.size(); ++i) {
    out << num(first.time(i));
    for (const auto* t : traces) out << ',' << num(t->samples[i]);
    out << '\n';
  }
}

void write_traces_csv(const std::string& path, const std::vector<const TimeTrace*>& traces) {
  auto out = open_out(path);
  write_traces_csv(out, traces);
}

std::vector<TimeTrace> read_traces_csv(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::vector<std::string> labels;
  bool have_t0 = false;
  bool have_dt = false;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<int> row_lines;
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string body = trim(t.substr(1));
      if (body.rfind("columns:", 0) == 0) {
        labels = split(trim(body.substr(8)), ',');
        for (auto& l : labels) l = trim(l);
        if (labels.size() < 2 || labels.front() != "time_s") {
          throw CsvError("header must start with time_s and name at least one signal", lineno);
        }
        cols.assign(labels.size() - 1, {});
      } else if (body.rfind("t0_s", 0) == 0 && body.find('=') != std::string::npos) {
        t0 = parse_number(body.substr(body.find('=') + 1), lineno);
        have_t0 = true;
      } else if (body.rfind("dt_s", 0) == 0 && body.find('=') != std::string::npos) {
        dt = parse_number(body.substr(body.find('=') + 1), lineno);
        have_dt = true;
      }
      continue;
    }
    if (labels.empty()) throw CsvError("data before the '# columns:' header", lineno);
    const auto fields = split(t, ',');
    if (fields.size() != labels.size()) {
      throw CsvError("expected " + std::to_string(labels.size()) + " fields, found " +
                         std::to_string(fields.size()), lineno);
    }
    times.push_back(parse_number(fields[0], lineno));
    row_lines.push_back(lineno);
    for (std::size_t k = 1; k < fields.size(); ++k) cols[k - 1].push_back(parse_number(fields[k], lineno));
  }
  if (labels.empty()) throw CsvError("missing '# columns:' header", lineno == 0 ? 1 : lineno);
  if (times.size() < 2) throw CsvError("need at least two data rows", lineno);
  if (!have_t0) t0 = times.front();
  if (!have_dt) {
    dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0)) throw CsvError("time column must increase", lineno);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double expect = t0 + dt * static_cast<double>(i);
      if (std::abs(times[i] - expect) > 1e-6 * dt * std::max(1.0, static_cast<double>(i))) {
        throw CsvError("non-uniform sampling", row_lines[i]);
      }
    }
  }
  std::vector<TimeTrace> out;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    TimeTrace tr;
    tr.t0 = t0;
    tr.dt = dt;
    tr.name = labels[k + 1];
    tr.unit = "";
    tr.samples = std::move(cols[k]);
    out.push_back(std::move(tr));
  }
  return out;
}

std::vector<TimeTrace> read_traces_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_traces_csv(in);
}

void write_counts_csv(const std::string& path, const CountTrace& counts) {
  auto out = open_out(path);
  out << "# columns: time_s,counts_per_bin\n# t0_s = " << exact(counts.t0)
      << "\n# dt_s = " << exact(counts.bin_width) << "\n# seed = " << counts.rng_seed << "\n";
  for (std::size_t i = 0; i < counts.counts.size(); ++i) {
    out << num(counts.t0 + counts.bin_width * static_cast<double>(i)) << ',' << counts.counts[i] << '\n';
  }
}

namespace {

template <class F>
void write_matrix(const std::string& path, const PhaseMap& map, const char* label, F cell) {
  auto out = open_out(path);
  out << "# " << label << "; rows: temperature_K, columns: bias_V\ntemperature_K";
  for (double v : map.voltages) out << ',' << num(v);
  out << '\n';
  for (std::size_t r = 0; r < map.temperatures.size(); ++r) {
    out << num(map.temperatures[r]);
    for (std::size_t k = 0; k < map.voltages.size(); ++k) out << ',' << cell(map.cells[r][k]);
    out << '\n';
  }
}

}  // namespace

void write_strength_csv(const std::string& path, const PhaseMap& map) {
  write_matrix(path, map, "oscillation strength A/gamma", [](const std::optional<OscillationMetrics>& m) {
    if (!m) return std::string("nan");
    return num(m->strength);
  });
}

void write_class_csv(const std::string& path, const PhaseMap& map) {
  write_matrix(path, map, "phase class", [](const std::optional<OscillationMetrics>& m) {
    return m ? to_string(m->phase_class) : std::string("missing");
  });
}

}  // namespace grosc
