#pragma once

// Six-controller benchmark on one scenario plus the RMSE ordering checks.

#include <array>
#include <chrono>
#include <exception>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ftismc/simulation.hpp"

namespace ftismc {

/// Outcome of a single named property or ordering check.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ControllerRun {
  ControllerKind kind;
  SimConfig config;
  RunResult result;
  std::string error;  // set when the run could not be constructed or threw
  double wall_seconds = 0.0;

  bool ok() const { return error.empty() && result.summary.status == RunStatus::ok; }
};

struct BenchmarkResult {
  std::vector<ControllerRun> runs;  // in kBenchmarkControllers order
  std::vector<CheckResult> ordering;
  double wall_seconds = 0.0;

  const ControllerRun& run(ControllerKind k) const {
    for (const auto& r : runs)
      if (r.kind == k) return r;
    throw std::out_of_range("benchmark has no run for " + std::string(to_string(k)));
  }

  bool ordering_ok() const {
    for (const auto& c : ordering)
      if (!c.passed) return false;
    return true;
  }
};

namespace bench_detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(5);
  os << v;
  return os.str();
}

/// a[axis] < b[axis] (or <=) for both joints; fails when either run failed.
inline CheckResult compare(const BenchmarkResult& b, ControllerKind lo, ControllerKind hi,
                           bool allow_equal) {
  CheckResult c;
  c.name = "rmse " + std::string(to_string(lo)) + (allow_equal ? " <= " : " < ") +
           std::string(to_string(hi));
  const auto& rl = b.run(lo);
  const auto& rh = b.run(hi);
  if (!rl.ok() || !rh.ok()) {
    c.passed = false;
    c.detail = "not evaluable:";
    if (!rl.ok()) c.detail += " " + std::string(to_string(lo)) + " failed";
    if (!rh.ok()) c.detail += " " + std::string(to_string(hi)) + " failed";
    return c;
  }
  c.passed = true;
  for (int axis = 0; axis < 2; ++axis) {
    const double a = rl.result.summary.rmse[axis];
    const double h = rh.result.summary.rmse[axis];
    const bool ok = allow_equal ? a <= h : a < h;
    c.passed = c.passed && ok;
    c.detail += (axis ? "; " : "") + std::string("joint ") + std::to_string(axis + 1) + ": " +
                fmt(a) + (ok ? (allow_equal ? " <= " : " < ") : " !< ") + fmt(h);
  }
  return c;
}

}  // namespace bench_detail

inline ControllerRun run_controller(const SimConfig& base, ControllerKind kind, RunOptions opts = {}) {
  ControllerRun out;
  out.kind = kind;
  out.config = base;
  out.config.controller.kind = kind;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    out.result = run_scenario(out.config, opts);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// FTISMC+BSP < ISMC+BSP < ISMC+CTC <= CTC and ISMC+PID < PID, per joint.
inline std::vector<CheckResult> ordering_checks(const BenchmarkResult& b) {
  using bench_detail::compare;
  using K = ControllerKind;
  return {compare(b, K::ftismc_bsp, K::ismc_bsp, false), compare(b, K::ismc_bsp, K::ismc_ctc, false),
          compare(b, K::ismc_ctc, K::ctc, true), compare(b, K::ismc_pid, K::pid, false)};
}

/// Runs the six benchmark controllers concurrently on `base`.
inline BenchmarkResult run_benchmark(const SimConfig& base, bool parallel = true) {
  BenchmarkResult out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto policy = parallel ? std::launch::async : std::launch::deferred;
  std::vector<std::future<ControllerRun>> jobs;
  for (auto k : kBenchmarkControllers)
    jobs.push_back(std::async(policy, [&base, k] { return run_controller(base, k); }));
  for (auto& j : jobs) out.runs.push_back(j.get());
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.ordering = ordering_checks(out);
  return out;
}

}  // namespace ftismc
