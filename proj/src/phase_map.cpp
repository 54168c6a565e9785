#include "grosc/phase_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace grosc {

PhaseMap build_phase_map(const std::vector<PhaseCell>& cells) {
  PhaseMap map;
  for (const auto& c : cells) {
    map.voltages.push_back(c.bias);
    map.temperatures.push_back(c.temperature);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(map.voltages);
  uniq(map.temperatures);
  map.cells.assign(map.temperatures.size(),
                   std::vector<std::optional<OscillationMetrics>>(map.voltages.size()));
  std::vector<std::vector<bool>> seen(map.temperatures.size(),
                                      std::vector<bool>(map.voltages.size(), false));
  auto index = [](const std::vector<double>& v, double x) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  for (const auto& c : cells) {
    const std::size_t r = index(map.temperatures, c.temperature);
    const std::size_t k = index(map.voltages, c.bias);
    if (seen[r][k]) {
      throw std::invalid_argument("duplicate phase-map cell at V=" + std::to_string(c.bias) +
                                  " T=" + std::to_string(c.temperature));
    }
    seen[r][k] = true;
    map.cells[r][k] = c.metrics;
  }

  double best = -1.0;
  for (std::size_t r = 0; r < map.temperatures.size(); ++r) {
    for (std::size_t k = 0; k < map.voltages.size(); ++k) {
      const auto& m = map.cells[r][k];
      if (!m) {
        ++map.missing;
        continue;
      }
      if (m->phase_class == PhaseClass::kStable) {
        const double v = map.voltages[k];
        const double t = map.temperatures[r];
        if (!map.island) {
          map.island = BoundingBox{v, v, t, t};
        } else {
          map.island->v_min = std::min(map.island->v_min, v);
          map.island->v_max = std::max(map.island->v_max, v);
          map.island->t_min = std::min(map.island->t_min, t);
          map.island->t_max = std::max(map.island->t_max, t);
        }
      }
      if (m->phase_class != PhaseClass::kAbsent && m->strength > best) {
        best = m->strength;
        map.max_strength_cell = std::make_pair(r, k);
      }
    }
  }
  return map;
}

std::vector<FrequencyPoint> max_frequency_vs_temperature(const PhaseMap& map) {
  if (map.temperatures.empty()) throw std::invalid_argument("phase map is empty");
  std::vector<FrequencyPoint> out;
  for (std::size_t r = 0; r < map.temperatures.size(); ++r) {
    double fmax = -1.0;
    for (const auto& m : map.cells[r]) {
      if (m && m->phase_class != PhaseClass::kAbsent) fmax = std::max(fmax, m->peak_frequency);
    }
    if (fmax >= 0) out.push_back({map.temperatures[r], fmax});
  }
  return out;
}

}  // namespace grosc
