#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "grosc/csv.hpp"
#include "grosc/runner.hpp"
#include "grosc/seeding.hpp"
#include "grosc/stability.hpp"

using namespace grosc;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
};

RunConfig load(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? calibrated_config() : load_config(c.config_path);
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.workers) cfg.worker_count = *c.workers;
  if (!c.out.empty()) cfg.output_directory = c.out;
  if (auto errs = validate_config(cfg); !errs.empty()) throw ConfigError(errs);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generation-recombination oscillation simulator and analysis toolkit"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "Configuration file");
  app.add_option("--seed", common.seed, "Master seed (u64)");
  app.add_option("--workers", common.workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "Output directory (file for gen-config)");

  auto* estimate = app.add_subcommand("estimate", "Print the carrier-statistics estimate chain");

  auto* simulate = app.add_subcommand("simulate", "Simulate one (V, T) point");
  double sim_v = 8.5;
  double sim_t = 8.0;
  simulate->add_option("--bias", sim_v, "Forward bias, V")->required();
  simulate->add_option("--temperature", sim_t, "Temperature, K")->required();

  auto* sweep = app.add_subcommand("sweep", "Run the (V, T) phase-map sweep");

  auto* analyze = app.add_subcommand("analyze", "Analyze trace CSV files");
  std::vector<std::string> files;
  analyze->add_option("files", files, "CSV files in the trace format")->required();

  auto* hopf = app.add_subcommand("hopf", "Locate the Hopf boundary");
  int hopf_nv = 66;
  std::optional<int> hopf_nt;
  hopf->add_option("--voltage-points", hopf_nv, "Voltage scan points per temperature");
  hopf->add_option("--temperature-points", hopf_nt, "Temperature lines (default: sweep.t_count)");

  auto* iv = app.add_subcommand("iv", "Current-voltage sweep");
  double iv_min = -10;
  double iv_max = 10;
  int iv_count = 41;
  double iv_t = 8.0;
  double iv_settle = 50e-6;
  iv->add_option("--vmin", iv_min, "First bias, V");
  iv->add_option("--vmax", iv_max, "Last bias, V");
  iv->add_option("--count", iv_count, "Number of biases")->check(CLI::PositiveNumber);
  iv->add_option("--temperature", iv_t, "Temperature, K");
  iv->add_option("--settle", iv_settle, "Settle time per bias, s");

  auto* gen = app.add_subcommand("gen-config", "Write the calibrated configuration");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::kInputError;
  }

  try {
    if (gen->parsed()) {
      RunConfig cfg = calibrated_config();
      if (common.seed) cfg.master_seed = *common.seed;
      const std::string text = serialize_config(cfg);
      if (common.out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(common.out) << text;
      }
      return exit_code::kOk;
    }

    const RunConfig cfg = load(common);
    if (estimate->parsed()) {
      std::cout << estimate_table(cfg);
      return exit_code::kOk;
    }
    if (simulate->parsed()) {
      const int code = run_simulate(cfg, sim_v, sim_t, cfg.output_directory);
      if (code != exit_code::kOk) std::cerr << "solver failure; partial trace written\n";
      return code;
    }
    if (sweep->parsed()) {
      const SweepResult r = run_sweep(cfg, cfg.worker_count, cfg.output_directory);
      std::cout << "cells: " << r.map.voltages.size() * r.map.temperatures.size()
                << ", failed: " << r.failed << "\n";
      return r.exit_code;
    }
    if (analyze->parsed()) {
      std::string err;
      const int code = run_analyze(files, cfg.analysis, cfg.output_directory, &err);
      if (code != exit_code::kOk) std::cerr << err << "\n";
      return code;
    }
    if (hopf->parsed()) {
      const auto& sw = cfg.sweep;
      HopfGrid grid{hopf_nv, hopf_nt.value_or(sw.t_count)};
      const auto pts = hopf_boundary(sw.v_start, sw.v_stop, sw.t_start, sw.t_stop, cfg.gr, grid);
      std::filesystem::create_directories(cfg.output_directory);
      std::ofstream out(cfg.output_directory + "/hopf_boundary.csv");
      out << "# columns: bias_V,temperature_K,hopf,frequency_Hz\n";
      char buf[160];
      for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%d,%.12e\n", p.bias, p.temperature, p.hopf ? 1 : 0, p.frequency);
        out << buf;
        std::cout << buf;
      }
      return exit_code::kOk;
    }
    if (iv->parsed()) {
      std::vector<double> biases;
      for (int i = 0; i < iv_count; ++i) {
        biases.push_back(iv_count == 1 ? iv_min : iv_min + (iv_max - iv_min) * i / (iv_count - 1));
      }
      std::optional<BurstNoise> burst;
      if (cfg.burst.enabled) {
        burst = cfg.burst.noise;
        burst->seed = derive_seed(cfg.master_seed, 0) ^ cfg.burst.noise.seed;
      }
      const auto curve = iv_sweep(biases, iv_t, cfg.gr, iv_settle, burst);
      std::filesystem::create_directories(cfg.output_directory);
      std::ofstream out(cfg.output_directory + "/iv.csv");
      out << "# columns: bias_V,current_A\n";
      char buf[96];
      for (const auto& p : curve) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", p.bias, p.current);
        out << buf;
        std::cout << buf;
      }
      return exit_code::kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return exit_code::kInputError;
  } catch (const StiffnessFailure& e) {
    std::cerr << e.what() << "\n";
    return exit_code::kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kInputError;
  }
  return exit_code::kOk;
}
