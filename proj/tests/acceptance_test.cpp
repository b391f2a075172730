// Acceptance runner. Prints one verdict line per criterion and exits non-zero
// if any selected criterion fails. `--criterion N` (repeatable) selects a subset.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ftismc/benchmark.hpp"
#include "ftismc/verify.hpp"

using namespace ftismc;

namespace {

// Tolerances, exactly as stated by the acceptance criteria.
constexpr double kBenchmarkWallLimit = 120.0;   // s, six runs
constexpr double kFtismcRmseJoint1 = 1e-3;      // m
constexpr double kFtismcRmseJoint2 = 5e-3;      // m
constexpr int kBoundTrials = 20;
constexpr double kBoundOffsetMin = 0.01;        // m
constexpr double kBoundOffsetMax = 5.0;         // m
constexpr double kBoundSpreadLimit = 2.0;       // max/min settling time
constexpr double kScalarSettleThreshold = 1e-6;
constexpr double kScalarSettleWallLimit = 1.0;        // s
constexpr int kReachingStates = 50;
constexpr double kSigma0Tol = 1e-12;
constexpr double kSigmaTol = 1e-6;
constexpr int kJacobianTrials = 100;
constexpr double kJacobianTol = 1e-6;
constexpr int kTorqueTrials = 1000;
constexpr double kTorqueTol = 1e-9;
constexpr double kResidualTol = 1e-6;           // N
constexpr double kEnergyDriftTol = 1e-6;        // relative, 10 s passive run
constexpr double kPlateauTol = 0.05;            // relative to 2a/kk
constexpr double kReturnWindow = 2.0;           // s after the force ends
constexpr double kReturnThreshold = 1e-4;       // m
constexpr double kForceJumpTol = 1e-12;         // N
constexpr std::uint64_t kSeed = 1;

struct Verdict {
  bool passed = true;
  std::vector<std::string> lines;

  void add(const CheckResult& c) {
    passed = passed && c.passed;
    lines.push_back(std::string(c.passed ? "ok   " : "FAIL ") + c.name + ": " + c.detail);
  }
  void add(std::string name, bool ok, std::string detail) { add(CheckResult{std::move(name), ok, std::move(detail)}); }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(5);
  os << v;
  return os.str();
}

const BenchmarkResult& benchmark() {
  static const BenchmarkResult b = run_benchmark(SimConfig{});
  return b;
}

// Published values per joint, for side-by-side reporting only.
const std::map<ControllerKind, std::pair<double, double>> kReportedRmse = {
    {ControllerKind::pid, {0.1211, 0.0845}},       {ControllerKind::ctc, {0.0070, 0.0314}},
    {ControllerKind::ismc_pid, {0.0446, 0.0644}},  {ControllerKind::ismc_ctc, {0.0064, 0.0220}},
    {ControllerKind::ismc_bsp, {2.0901e-4, 0.0016}}, {ControllerKind::ftismc_bsp, {5.7841e-5, 4.4889e-4}}};

Verdict criterion1() {
  Verdict v;
  const auto& b = benchmark();
  for (const auto& r : b.runs) {
    const auto reported = kReportedRmse.at(r.kind);
    std::string d;
    if (r.ok()) {
      d = num(r.result.summary.rmse[0]) + " / " + num(r.result.summary.rmse[1]);
    } else {
      d = "failed: " + (r.error.empty() ? r.result.summary.message + " at t = " + num(r.result.summary.t_end) : r.error);
    }
    v.lines.push_back("info " + std::string(to_string(r.kind)) + " rmse " + d + " (reported " + num(reported.first) +
                      " / " + num(reported.second) + ")");
  }
  for (const auto& c : b.ordering) v.add(c);
  v.add("runtime", b.wall_seconds < kBenchmarkWallLimit,
        num(b.wall_seconds) + " s for six runs (limit " + num(kBenchmarkWallLimit) + " s)");
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto& r = benchmark().run(ControllerKind::ftismc_bsp);
  if (!r.ok()) {
    v.add("ftismc_bsp rmse band", false, "run failed");
    return v;
  }
  const Vec2 e = r.result.summary.rmse;
  v.add("ftismc_bsp rmse joint 1", e[0] <= kFtismcRmseJoint1, num(e[0]) + " <= " + num(kFtismcRmseJoint1));
  v.add("ftismc_bsp rmse joint 2", e[1] <= kFtismcRmseJoint2, num(e[1]) + " <= " + num(kFtismcRmseJoint2));
  const Vec2 p = r.result.summary.rmse_post;
  v.lines.push_back("info post-transient rmse (t >= " + num(r.config.transient) + " s) " + num(p[0]) + " / " + num(p[1]));
  return v;
}

Verdict criterion3() {
  Verdict v;
  v.add(verify::bound_respect(SimConfig{}, kSeed, kBoundTrials, kBoundOffsetMin, kBoundOffsetMax, kBoundSpreadLimit));
  return v;
}

Verdict criterion4() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  v.add(verify::scalar_fixed_time_settling(FixedTimeGains(1.0, 1.0, 0.5, 2.0), {0.1, -0.1, 10.0, -10.0, 1000.0, -1000.0},
                       kScalarSettleThreshold));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.add("runtime", wall < kScalarSettleWallLimit, num(wall) + " s (limit " + num(kScalarSettleWallLimit) + " s)");
  return v;
}

Verdict criterion5() {
  Verdict v;
  v.add(verify::reaching_phase(SimConfig{}, kSeed, kReachingStates, 1.0, kSigma0Tol, kSigmaTol));
  return v;
}

Verdict criterion6() {
  Verdict v;
  const SimConfig base;
  v.add(verify::jacobian_fd(base.effective_robot(), kSeed, kJacobianTrials, kJacobianTol));
  v.add(verify::torque_model(base.effective_robot(), kSeed, kTorqueTrials, kTorqueTol));
  SimConfig traj = base;
  traj.duration = 12.0;  // covers the force ramp-in
  v.add(verify::cartesian_residual(traj, kResidualTol));
  v.add(verify::energy_drift(base.robot, kSeed, 10.0, 1e-4, kEnergyDriftTol));
  return v;
}

Verdict criterion7() {
  Verdict v;
  const auto& r = benchmark().run(ControllerKind::ftismc_bsp);
  const auto& cfg = r.config;
  const auto& log = r.result.log;
  if (!r.ok()) {
    v.add("admittance behavior", false, "benchmark run failed");
    return v;
  }
  const Vec2 level = (2.0 * cfg.force.amplitude.array() / cfg.admittance.kk.array()).matrix();

  double pre = 0.0, peak = 0.0, plateau_dev = 0.0;
  std::optional<double> last_above;
  for (const auto& row : log) {
    const Vec2 off = row.xr - row.xd;
    if (row.t < cfg.force.t_on) pre = std::max(pre, inf_norm(off));
    if (row.t >= cfg.force.t_on && row.t < cfg.force.t_off) peak = std::max(peak, inf_norm(off));
    // Level reached by the end of the plateau, last second before ramp-down.
    if (row.t >= cfg.force.t_rampdown - 1.0 && row.t < cfg.force.t_rampdown)
      plateau_dev = std::max(plateau_dev, ((off - level).array().abs() / level.array()).maxCoeff());
    if (inf_norm(off) >= kReturnThreshold) last_above = row.t;
  }
  v.add("no offset before contact", pre == 0.0, "max |xr - xd| for t < " + num(cfg.force.t_on) + " s = " + num(pre));
  v.add("plateau level", plateau_dev <= kPlateauTol,
        "offset over the last plateau second within " + num(100 * plateau_dev) + "% of 2a/kk = " + num(level[0]) +
            " (limit " + num(100 * kPlateauTol) + "%); transient peak " + num(peak));
  const double deadline = cfg.force.t_off + kReturnWindow;
  const bool back = last_above && *last_above < deadline;
  v.add("return after release", back,
        "|xr - xd| last >= " + num(kReturnThreshold) + " at t = " + (last_above ? num(*last_above) : "never") +
            " s (deadline " + num(deadline) + " s)");
  return v;
}

Verdict criterion8() {
  Verdict v;
  v.add(verify::force_continuity(ForceProfile{}, kForceJumpTol));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Verdict()>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      const int n = std::atoi(argv[++i]);
      if (!criteria.count(n)) {
        std::cerr << "unknown criterion " << argv[i] << "\n";
        return 2;
      }
      selected.insert(n);
    } else {
      std::cerr << "usage: acceptance_test [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty())
    for (const auto& [n, _] : criteria) selected.insert(n);

  bool all = true;
  for (int n : selected) {
    const Verdict v = criteria.at(n)();
    all = all && v.passed;
    std::cout << "[criterion " << n << "] " << (v.passed ? "PASS" : "FAIL") << "\n";
    for (const auto& l : v.lines) std::cout << "    " << l << "\n";
  }
  return all ? 0 : 1;
}
