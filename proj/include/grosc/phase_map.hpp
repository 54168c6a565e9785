#pragma once

#include <optional>
#include <vector>

#include "grosc/oscillation.hpp"

namespace grosc {

struct PhaseCell {
  double bias;         // V
  double temperature;  // K
  std::optional<OscillationMetrics> metrics;  // empty: cell failed or missing
};

struct BoundingBox {
  double v_min, v_max, t_min, t_max;
};

struct PhaseMap {
  std::vector<double> voltages;      // ascending
  std::vector<double> temperatures;  // ascending
  /// Row-major [temperature][voltage]; empty optional marks a missing cell.
  std::vector<std::vector<std::optional<OscillationMetrics>>> cells;

  std::optional<BoundingBox> island;  // extent of stable cells
  std::optional<std::pair<std::size_t, std::size_t>> max_strength_cell;  // (row, col)
  std::size_t missing = 0;

  const std::optional<OscillationMetrics>& at(std::size_t row, std::size_t col) const {
    return cells[row][col];
  }
};

/// Assembles the grid from the distinct bias and temperature values present.
/// Grid positions without a cell are recorded as missing.
PhaseMap build_phase_map(const std::vector<PhaseCell>& cells);

struct FrequencyPoint {
  double temperature;
  double max_frequency;
};

/// Per temperature row, the largest peak frequency among non-absent cells.
std::vector<FrequencyPoint> max_frequency_vs_temperature(const PhaseMap& map);

}  // namespace grosc
