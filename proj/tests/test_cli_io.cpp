#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "grosc/config.hpp"
#include "grosc/csv.hpp"
#include "grosc/runner.hpp"
#include "grosc/seeding.hpp"

using namespace grosc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("grosc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

RunConfig small_sweep_config() {
  RunConfig c = calibrated_config();
  c.sweep.v_start = 7.9;
  c.sweep.v_stop = 9.2;
  c.sweep.v_count = 4;
  c.sweep.t_start = 8.0;
  c.sweep.t_stop = 16.0;
  c.sweep.t_count = 2;
  return c;
}

}  // namespace

TEST_CASE("shipped config parses and validates") {
  const RunConfig c = calibrated_config();
  CHECK(validate_config(c).empty());
  const fs::path shipped = fs::path(GROSC_SOURCE_DIR) / "configs" / "calibrated.conf";
  REQUIRE(fs::exists(shipped));
  const RunConfig loaded = load_config(shipped.string());
  CHECK(serialize_config(loaded) == serialize_config(c));
}

TEST_CASE("config errors carry key paths") {
  SUBCASE("invariant violation") {
    try {
      parse_config("[gr]\ntrap_density = -1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e.errors, "gr.trap_density"));
    }
  }
  SUBCASE("every error is reported") {
    try {
      parse_config("[gr]\ntrap_density = -1\nbogus_key = 3\n[sweep]\nv_count = two\n[nowhere]\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.errors.size() >= 4);
      CHECK(mentions(e.errors, "gr.trap_density"));
      CHECK(mentions(e.errors, "gr.bogus_key"));
      CHECK(mentions(e.errors, "sweep.v_count"));
      CHECK(mentions(e.errors, "nowhere"));
    }
  }
  SUBCASE("cross-field invariant") {
    try {
      parse_config("[sweep]\nv_start = 9\nv_stop = 8\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e.errors, "sweep.v_"));
    }
  }
}

TEST_CASE("config round trip over generated configs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    RunConfig c = calibrated_config();
    c.gr.trap_density *= u(rng);
    c.gr.ionization_prefactor *= u(rng);
    c.gr.critical_field *= u(rng);
    c.gr.recombination_saturation *= u(rng);
    c.device.load_resistance *= u(rng);
    c.material.electron_mobility_ref *= u(rng);
    c.readout.fast_lifetime *= u(rng);
    c.analysis.strength_threshold *= u(rng);
    c.analysis.relative = trial % 2 == 0;
    c.protocol.kind = static_cast<ProtocolKind>(trial % 3);
    c.protocol.signal = trial % 2 ? SignalKind::kCurrent : SignalKind::kPhotonRate;
    c.sweep.v_count = 1 + trial;
    c.master_seed = rng();
    c.burst.enabled = trial % 4 == 0;
    c.sync();
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config(text);
    CHECK(serialize_config(back) == text);
    CHECK(back.master_seed == c.master_seed);
    CHECK(back.gr.trap_density == c.gr.trap_density);
  }
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
  CHECK(derive_seed(2, 5) != derive_seed(1, 5));
  CHECK(derive_seed(0, 0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("csv round trip is byte stable") {
  TimeTrace a;
  a.t0 = 1.25e-6;
  a.dt = 1e-8;
  a.name = "current";
  a.unit = "A";
  for (int i = 0; i < 300; ++i) a.samples.push_back(1e-7 * std::sin(0.37 * i) + 3.3e-9 * i);
  TimeTrace b = a;
  b.name = "photon_rate";
  b.unit = "1/s";
  for (double& x : b.samples) x = std::abs(x) * 1e19;

  std::ostringstream first;
  write_traces_csv(first, {&a, &b});
  std::istringstream in(first.str());
  const auto back = read_traces_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(column_label(back[0]) == "current_A");
  CHECK(column_label(back[1]) == "photon_rate_1/s");
  CHECK(back[0].dt == a.dt);
  CHECK(back[0].t0 == a.t0);
  std::ostringstream second;
  write_traces_csv(second, {&back[0], &back[1]});
  CHECK(second.str() == first.str());
  CHECK(first.str().rfind("# columns: time_s,current_A,photon_rate_1/s", 0) != std::string::npos);
}

TEST_CASE("malformed csv reports a line number") {
  std::istringstream bad("# columns: time_s,x\n0,1\n1e-8,2\n2e-8,oops\n");
  try {
    read_traces_csv(bad);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line == 4);
  }
  std::istringstream empty("");
  CHECK_THROWS_AS(read_traces_csv(empty), CsvError);
}

TEST_CASE("analyze subcommand") {
  const fs::path dir = scratch("analyze");
  SUBCASE("empty file is an input error") {
    std::ofstream(dir / "empty.csv").close();
    std::string err;
    CHECK(run_analyze({(dir / "empty.csv").string()}, {}, dir.string(), &err) == exit_code::kInputError);
    CHECK_FALSE(err.empty());
  }
  SUBCASE("exported simulation reanalyzes to the same metrics") {
    const RunConfig c = calibrated_config();
    const CellResult cell = simulate_cell(c, 8.5, 8.0, 1);
    REQUIRE(cell.metrics.has_value());
    const fs::path csv = dir / "analyzed.csv";
    write_traces_csv(csv.string(), {&cell.analyzed});
    const auto back = read_traces_csv(csv.string());
    REQUIRE(back.size() == 1);
    const auto m = analyze_trace(back[0], c.analysis);
    CHECK(m.phase_class == cell.metrics->phase_class);
    CHECK(std::abs(m.peak_frequency - cell.metrics->peak_frequency) <= 1e-12 * cell.metrics->peak_frequency);
    CHECK(std::abs(m.strength - cell.metrics->strength) <= 1e-12 * cell.metrics->strength);
    CHECK(run_analyze({csv.string()}, c.analysis, dir.string()) == exit_code::kOk);
    CHECK(fs::exists(dir / "analyzed.metrics.json"));
  }
  SUBCASE("damped cosine fixture") {
    TimeTrace t;
    t.dt = 10e-9;
    t.name = "fixture";
    for (int i = 0; i < 3000; ++i)
      t.samples.push_back(std::exp(-t.time(i) / 4e-6) * std::cos(2 * M_PI * 2e6 * t.time(i)));
    const fs::path csv = dir / "fixture.csv";
    write_traces_csv(csv.string(), {&t});
    const auto back = read_traces_csv(csv.string());
    const auto fit = fit_damped_cosine(back[0], 2e6);
    CHECK(fit.frequency == doctest::Approx(2e6).epsilon(0.05));
    CHECK(fit.decay_time == doctest::Approx(4e-6).epsilon(0.05));
  }
}

TEST_CASE("simulate end to end") {
  const fs::path dir = scratch("simulate");
  RunConfig c = calibrated_config();
  SUBCASE("in-island point is stable") {
    CHECK(run_simulate(c, 8.5, 8.0, dir.string()) == exit_code::kOk);
    for (const char* f : {"state.csv", "current.csv", "photon_rate.csv", "metrics.json"})
      CHECK(fs::exists(dir / f));
    CHECK(simulate_cell(c, 8.5, 8.0, 1).metrics->phase_class == PhaseClass::kStable);
  }
  SUBCASE("far below threshold is absent") {
    CHECK(simulate_cell(c, 3.0, 8.0, 1).metrics->phase_class == PhaseClass::kAbsent);
  }
  SUBCASE("dark zero bias is constant") {
    RunConfig dark;
    dark.protocol.kind = ProtocolKind::kDc;
    const CellResult cell = simulate_cell(dark, 0.0, 8.0, 1);
    for (double v : cell.trajectory.n.samples) CHECK(v == cell.trajectory.n.samples.front());
    CHECK(cell.metrics->phase_class == PhaseClass::kAbsent);
  }
}

TEST_CASE("sweep determinism and single cell equivalence") {
  const RunConfig c = small_sweep_config();
  const fs::path d1 = scratch("sweep1"), d4 = scratch("sweep4");
  const auto r1 = run_sweep(c, 1, d1.string());
  const auto r4 = run_sweep(c, 4, d4.string());
  CHECK(r1.exit_code == exit_code::kOk);
  CHECK(slurp(d1 / "strength.csv") == slurp(d4 / "strength.csv"));
  CHECK(slurp(d1 / "class.csv") == slurp(d4 / "class.csv"));
  CHECK(slurp(d1 / "summary.json") == slurp(d4 / "summary.json"));

  RunConfig one = c;
  one.sweep.v_start = one.sweep.v_stop = 8.5;
  one.sweep.v_count = 1;
  one.sweep.t_start = one.sweep.t_stop = 8.0;
  one.sweep.t_count = 1;
  const auto single = run_sweep(one, 1);
  const CellResult direct = simulate_cell(one, 8.5, 8.0, derive_seed(one.master_seed, 0));
  REQUIRE(single.map.at(0, 0).has_value());
  CHECK(single.map.at(0, 0)->strength == direct.metrics->strength);
  CHECK(single.map.at(0, 0)->phase_class == direct.metrics->phase_class);
}

TEST_CASE("estimate table renders the arithmetic chain") {
  const std::string t = estimate_table(calibrated_config());
  CHECK(t.find("123.894") != std::string::npos);
  CHECK(t.find("162") != std::string::npos);
  CHECK(t.find("0.154196") != std::string::npos);
}
