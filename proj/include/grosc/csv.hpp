#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "grosc/phase_map.hpp"
#include "grosc/protocols.hpp"
#include "grosc/time_trace.hpp"

namespace grosc {

/// Malformed input, with the 1-based line number where it was detected.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, int line_number)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what), line(line_number) {}
  int line;
};

/// Column label of a trace: name, or name_unit when the unit is set.
std::string column_label(const TimeTrace& trace);

/// Traces sharing one time grid. Header `# columns: time_s,<label>...` plus
/// `# t0_s` / `# dt_s` lines; values in %.16e so a read-back is exact.
void write_traces_csv(std::ostream& out, const std::vector<const TimeTrace*>& traces);
void write_traces_csv(const std::string& path, const std::vector<const TimeTrace*>& traces);

/// Reads the format above. Without t0/dt metadata the grid is taken from the
/// time column, which must be uniform to 1e-6 relative.
std::vector<TimeTrace> read_traces_csv(std::istream& in);
std::vector<TimeTrace> read_traces_csv(const std::string& path);

void write_counts_csv(const std::string& path, const CountTrace& counts);

/// Strength matrix, rows = temperatures. Missing cells are written as nan.
void write_strength_csv(const std::string& path, const PhaseMap& map);
/// Class matrix with stable/damped/absent/missing entries.
void write_class_csv(const std::string& path, const PhaseMap& map);

}  // namespace grosc
