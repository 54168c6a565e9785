#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grosc/config.hpp"
#include "grosc/phase_map.hpp"

namespace grosc {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kSolverFailure = 3;
inline constexpr int kPartialSweep = 4;
}  // namespace exit_code

struct CellResult {
  double bias = 0.0;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  bool solver_failed = false;
  std::string error;
  Trajectory trajectory;            // possibly partial
  TimeTrace current;                // A
  std::optional<TimeTrace> photon_rate;
  std::optional<CountTrace> counts;
  TimeTrace analyzed;               // window handed to the analysis
  std::optional<OscillationMetrics> metrics;
};

/// The drive program the config describes at forward bias v.
PulseSequence protocol_sequence(const ProtocolConfig& protocol, double v);

/// Starting state: the tracked equilibrium at the protocol's idle bias.
GRState initial_state(const RunConfig& config, double v, double temperature);

/// Simulates one (V, T) point and analyzes the protocol's observation window.
CellResult simulate_cell(const RunConfig& config, double v, double temperature, std::uint64_t seed);

/// Writes traces and metrics JSON for one point. Returns an exit code.
int run_simulate(const RunConfig& config, double v, double temperature, const std::string& out_dir);

struct SweepResult {
  PhaseMap map;
  std::size_t failed = 0;
  int exit_code = exit_code::kOk;
};

/// Executes every cell on up to worker_count threads; output is independent of
/// the number of workers.
SweepResult run_sweep(const RunConfig& config, int workers);

/// run_sweep plus per-cell JSON, strength/class matrices and a summary.
SweepResult run_sweep(const RunConfig& config, int workers, const std::string& out_dir);

/// Analyzes every signal column of each CSV with the configured analysis.
/// Writes <stem>.metrics.json per input. Returns an exit code.
int run_analyze(const std::vector<std::string>& files, const AnalysisConfig& analysis,
                const std::string& out_dir, std::string* error = nullptr);

/// SI-style carrier estimate table.
std::string estimate_table(const RunConfig& config);

}  // namespace grosc
