// Command-line front end: run | benchmark | bounds | verify.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ftismc/benchmark.hpp"
#include "ftismc/config.hpp"
#include "ftismc/io.hpp"
#include "ftismc/verify.hpp"

namespace fs = std::filesystem;
using namespace ftismc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitAssertion = 4;

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  std::string controller;
  std::optional<std::uint64_t> seed;
  bool empirical = false;
};

/// Config file (if any), then --set overrides, then the dedicated flags.
SimConfig effective_config(const Options& o, bool config_required) {
  if (config_required && o.config.empty()) throw ConfigError("--config is required");
  SimConfig cfg;
  if (!o.config.empty()) {
    if (!fs::exists(o.config)) throw ConfigError("config file '" + o.config + "' does not exist");
    cfg = load_config(o.config);
  }
  apply_overrides(cfg, o.overrides);
  if (!o.controller.empty()) apply_overrides(cfg, {"simulation.controller=" + o.controller});
  if (o.seed) cfg.seed = *o.seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

fs::path out_dir(const Options& o, const SimConfig& cfg) {
  if (!o.out.empty()) return o.out;
  if (!cfg.output.empty()) return cfg.output;
  return "out";
}

void report(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

std::vector<fs::path> write_run(const fs::path& dir, const SimConfig& cfg, const RunResult& r) {
  const std::string stem(to_string(cfg.controller.kind));
  const fs::path csv = dir / (stem + ".csv");
  const fs::path summary = dir / (stem + "_summary.json");
  write_csv(csv, r.log);
  write_json(summary, summary_json(r.summary, cfg));
  return {csv, summary};
}

int cmd_run(const Options& o) {
  const SimConfig cfg = effective_config(o, true);
  const fs::path dir = out_dir(o, cfg);
  const RunResult r = run_scenario(cfg);
  auto files = write_run(dir, cfg, r);
  report(files);
  const auto& s = r.summary;
  std::cout << to_string(cfg.controller.kind) << ": status " << to_string(s.status) << ", rmse "
            << s.rmse[0] << " / " << s.rmse[1] << ", max psi " << s.max_psi
            << (s.rho_ok ? "" : " (exceeds rho)") << "\n";
  if (s.status != RunStatus::ok) {
    std::cerr << "run aborted at t = " << s.t_end << ": " << s.message << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_benchmark(const Options& o) {
  const SimConfig cfg = effective_config(o, true);
  const fs::path dir = out_dir(o, cfg);
  const BenchmarkResult b = run_benchmark(cfg);

  std::vector<fs::path> files;
  std::vector<TableColumn> full, post;
  for (const auto& run : b.runs) {
    const std::string name(to_string(run.kind));
    if (run.error.empty()) {
      auto f = write_run(dir, run.config, run.result);
      files.insert(files.end(), f.begin(), f.end());
    }
    full.push_back({name, run.ok() ? std::optional<Vec2>(run.result.summary.rmse) : std::nullopt});
    post.push_back({name, run.ok() ? std::optional<Vec2>(run.result.summary.rmse_post) : std::nullopt});
    std::cout << name << ": ";
    if (!run.error.empty()) {
      std::cout << "failed (" << run.error << ")\n";
    } else if (!run.ok()) {
      std::cout << "failed (" << to_string(run.result.summary.status) << " at t = "
                << run.result.summary.t_end << ": " << run.result.summary.message << ")\n";
    } else {
      std::cout << "rmse " << run.result.summary.rmse[0] << " / " << run.result.summary.rmse[1]
                << "\n";
    }
  }
  files.push_back(dir / "rmse_table.csv");
  write_table(files.back(), full);
  files.push_back(dir / "rmse_post_transient_table.csv");
  write_table(files.back(), post);
  report(files);

  for (const auto& c : b.ordering)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  std::cout << "benchmark wall time " << b.wall_seconds << " s\n";
  return b.ordering_ok() ? kExitOk : kExitAssertion;
}

int cmd_bounds(const Options& o) {
  const SimConfig cfg = effective_config(o, false);
  BoundReport b;
  try {
    b = theoretical_bounds(cfg.controller);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (o.empirical) {
    SimConfig c = cfg;
    c.controller.kind = ControllerKind::ftismc_bsp;
    const RunResult r = run_scenario(c, RunOptions{true});
    if (r.summary.status != RunStatus::ok) {
      std::cerr << "empirical run aborted: " << r.summary.message << "\n";
      return kExitRuntime;
    }
    b.empirical = r.summary.settling_time;
  }
  const fs::path file = out_dir(o, cfg) / "bounds.json";
  write_json(file, bounds_json(b));
  report({file});
  std::cout << "T_s1 " << b.t_s1 << ", T_r1 " << b.t_r1 << ", T_s2 " << b.t_s2 << ", T_r2 "
            << b.t_r2 << ", T_n " << b.t_n << "\n"
            << "fixed-time surface total " << b.total_thm1 << "\n"
            << "nonsingular surface total " << b.total_thm2 << " + epsilon(tau) unquantified\n";
  return kExitOk;
}

int cmd_verify(const Options& o) {
  const SimConfig cfg = effective_config(o, false);
  bool ok = true;
  for (const auto& c : verify::all(cfg, cfg.seed)) {
    ok = ok && c.passed;
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  return ok ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-time integral sliding mode control laboratory for a two-link arm"};
  app.require_subcommand(1, 1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "Scenario file (INI sections robot, admittance, force, controller, simulation)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--set", o.overrides, "Override KEY=VALUE (section.key or a unique bare key); repeatable")
        ->allow_extra_args(false);
    sub->add_option("--controller", o.controller, "pid | ctc | ismc_pid | ismc_ctc | ismc_bsp | ftismc_bsp");
    sub->add_option("--seed", o.seed, "Seed for randomized suites");
  };
  auto* run = app.add_subcommand("run", "Simulate one scenario");
  auto* bench = app.add_subcommand("benchmark", "Run the six-controller comparison");
  auto* bounds = app.add_subcommand("bounds", "Settling-time bound report");
  auto* ver = app.add_subcommand("verify", "Randomized property suites");
  for (auto* s : {run, bench, bounds, ver}) common(s);
  bounds->add_flag("--empirical", o.empirical, "Also measure the settling time of the configured scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*bench) return cmd_benchmark(o);
    if (*bounds) return cmd_bounds(o);
    return cmd_verify(o);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
