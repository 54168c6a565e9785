#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "grosc/gr_dynamics.hpp"
#include "grosc/oscillation.hpp"
#include "grosc/protocols.hpp"

namespace grosc {

enum class ProtocolKind { kPulsedEl, kDcPl, kDc };
enum class SignalKind { kCurrent, kPhotonRate };

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::kPulsedEl;
  double t_high = 30e-6;       // s, forward segment (pulsed EL)
  double v_rev = -8.5;         // V (pulsed EL)
  double period = 150e-6;      // s
  int repeat_count = 1;
  double laser_power = 0.0;    // W (DC PL)
  double laser_width = 100e-9; // s (DC PL)
  double duration = 30e-6;     // s (DC hold)
  double output_dt = 10e-9;    // s
  double rtol = 1e-6;
  double atol = 1e-9;          // scaled units
  SignalKind signal = SignalKind::kCurrent;
  double count_bin_width = 0.0;  // s; 0 disables photon-count synthesis
};

struct SweepConfig {
  double v_start = 6.75;
  double v_stop = 10.0;
  int v_count = 20;
  double t_start = 6.0;
  double t_stop = 22.0;
  int t_count = 12;

  double voltage(int i) const;
  double temperature(int i) const;
};

struct BurstConfig {
  bool enabled = false;
  BurstNoise noise;
};

struct RunConfig {
  MaterialParams material;
  DeviceParams device;
  GRParams gr;  // gr.material and gr.device mirror the sections above
  ReadoutModel readout;
  ProtocolConfig protocol;
  AnalysisConfig analysis;
  SweepConfig sweep;
  BurstConfig burst;
  std::uint64_t master_seed = 1;
  std::string output_directory = "out";
  int worker_count = 1;

  /// Copies material/device into gr.
  void sync();
};

/// Carries every problem found, each prefixed with its key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  std::vector<std::string> errors;
};

/// Parses the `[section]` / `key = value` format and validates every
/// section. Unknown sections or keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Writes every key, so the output is an exhaustive config.
std::string serialize_config(const RunConfig& config);

/// Returns all invariant violations as path-qualified messages.
std::vector<std::string> validate_config(const RunConfig& config);

/// The calibrated parameter set shipped as configs/calibrated.conf.
RunConfig calibrated_config();

}  // namespace grosc
