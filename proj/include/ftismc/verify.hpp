#pragma once

// Randomized property suites shared by the `verify` subcommand and the
// acceptance runner. Each suite compares the library against an independent
// oracle and reports the worst observed deviation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ftismc/admittance.hpp"
#include "ftismc/analysis.hpp"
#include "ftismc/benchmark.hpp"
#include "ftismc/fxmath.hpp"
#include "ftismc/integrator.hpp"
#include "ftismc/manipulator.hpp"
#include "ftismc/simulation.hpp"

namespace ftismc::verify {

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline CheckResult result(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

/// Torques of the two-link arm written out term by term.
inline Vec2 direct_torque(const RobotParams& p, const Vec2& q, const Vec2& qd, const Vec2& qdd) {
  const double c1 = std::cos(q[0]), c2 = std::cos(q[1]), s2 = std::sin(q[1]);
  const double c12 = std::cos(q[0] + q[1]);
  const double m1 = p.m1, m2 = p.m2, l1 = p.l1, l2 = p.l2, g = p.g;
  const double tau1 = ((m1 + m2) * l1 * l1 + m2 * l2 * l2 + 2 * m2 * l1 * l2 * c2) * qdd[0] +
                      (m2 * l2 * l2 + m2 * l1 * l2 * c2) * qdd[1] -
                      m2 * l1 * l2 * s2 * qd[1] * qd[1] - 2 * m2 * l1 * l2 * s2 * qd[0] * qd[1] +
                      m2 * l2 * g * c12 + (m1 + m2) * l1 * g * c1;
  const double tau2 = (m2 * l2 * l2 + m2 * l1 * l2 * c2) * qdd[0] + m2 * l2 * l2 * qdd[1] +
                      m2 * l1 * l2 * s2 * qd[0] * qd[0] + m2 * l2 * g * c12;
  return {tau1, tau2};
}

}  // namespace detail

/// sum x_i^(k+1) >= (sum x_i^2)^((k+1)/2) for positive x and k in (0, 1).
inline CheckResult power_mean_lower_bound(std::uint64_t seed, int trials = 1000) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(1e-3, 10.0), uk(1e-3, 1.0 - 1e-3);
  std::uniform_int_distribution<int> un(1, 6);
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const int n = un(rng);
    const double k = uk(rng);
    double lhs = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = ux(rng);
      lhs += std::pow(x, k + 1.0);
      sq += x * x;
    }
    const double rhs = std::pow(sq, (k + 1.0) / 2.0);
    const double margin = (lhs - rhs) / rhs;
    worst = std::min(worst, margin);
    if (margin < -1e-12) ++violations;
  }
  return detail::result("sub-quadratic power sum", violations == 0,
                        std::to_string(trials) + " samples, " + std::to_string(violations) +
                            " violations, min relative margin " + detail::sci(worst));
}

/// sum x_i^k >= n^(1-k) (sum x_i)^k for positive x and k > 1.
inline CheckResult power_sum_lower_bound(std::uint64_t seed, int trials = 1000) {
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> ux(1e-3, 10.0), uk(1.0 + 1e-3, 4.0);
  std::uniform_int_distribution<int> un(1, 6);
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const int n = un(rng);
    const double k = uk(rng);
    double lhs = 0.0, sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = ux(rng);
      lhs += std::pow(x, k);
      sum += x;
    }
    const double rhs = std::pow(static_cast<double>(n), 1.0 - k) * std::pow(sum, k);
    const double margin = (lhs - rhs) / rhs;
    worst = std::min(worst, margin);
    if (margin < -1e-12) ++violations;
  }
  return detail::result("super-linear power sum", violations == 0,
                        std::to_string(trials) + " samples, " + std::to_string(violations) +
                            " violations, min relative margin " + detail::sci(worst));
}

/// Time after which |y| stays below `threshold` for ydot = -l1[y]^a - l2[y]^b,
/// integrated with RK4 over [0, horizon]; nullopt if still above at the end.
inline std::optional<double> scalar_settling_time(const FixedTimeGains& g, double y0, double dt,
                                                  double horizon, double threshold) {
  double y = y0;
  std::optional<double> since = std::abs(y) < threshold ? std::optional<double>(0.0) : std::nullopt;
  const auto n = static_cast<long>(std::llround(horizon / dt));
  for (long k = 0; k < n; ++k) {
    y = rk4_step([&g](double, double yy) { return g.rate(yy); }, k * dt, y, dt);
    const double t = (k + 1) * dt;
    if (std::abs(y) >= threshold) {
      since.reset();
    } else if (!since) {
      since = t;
    }
  }
  return since;
}

/// Settling below `threshold` before the closed-form bound for each y0.
inline CheckResult scalar_fixed_time_settling(const FixedTimeGains& g, const std::vector<double>& y0s,
                          double threshold = 1e-6, double dt = 1e-4) {
  const double bound = fixed_time_bound(g);
  bool ok = true;
  std::ostringstream os;
  os << "bound " << bound << " s;";
  for (double y0 : y0s) {
    const auto ts = scalar_settling_time(g, y0, dt, 2.0 * bound, threshold);
    const bool pass = ts && *ts <= bound;
    ok = ok && pass;
    os << " y0=" << y0 << ": " << (ts ? std::to_string(*ts) : std::string("none"));
  }
  return detail::result("scalar fixed-time settling", ok, os.str());
}

/// Jacobian against central differences of forward kinematics.
inline CheckResult jacobian_fd(const RobotParams& p, std::uint64_t seed, int trials = 100,
                               double tol = 1e-6) {
  std::mt19937_64 rng(seed + 2);
  std::uniform_real_distribution<double> uq(-std::numbers::pi, std::numbers::pi);
  const double h = 1e-6;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vec2 q{uq(rng), uq(rng)};
    const Mat2 J = jacobian(p, JointState{q, Vec2::Zero()});
    for (int j = 0; j < 2; ++j) {
      Vec2 dq = Vec2::Zero();
      dq[j] = h;
      const Vec2 col = (forward_kinematics(p, JointState{q + dq, Vec2::Zero()}) -
                        forward_kinematics(p, JointState{q - dq, Vec2::Zero()})) /
                       (2 * h);
      worst = std::max(worst, inf_norm(col - J.col(j)));
    }
  }
  return detail::result("jacobian vs finite differences", worst < tol,
                        std::to_string(trials) + " configurations, max abs error " +
                            detail::sci(worst) + " (tol " + detail::sci(tol) + ")");
}

/// M qdd + C qd + G against the arm's torque equations written out directly.
inline CheckResult torque_model(const RobotParams& p, std::uint64_t seed, int trials = 1000,
                                double tol = 1e-9) {
  std::mt19937_64 rng(seed + 3);
  std::uniform_real_distribution<double> uq(-std::numbers::pi, std::numbers::pi), uv(-5.0, 5.0),
      ua(-20.0, 20.0);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vec2 q{uq(rng), uq(rng)}, qd{uv(rng), uv(rng)}, qdd{ua(rng), ua(rng)};
    const JointState st{q, qd};
    const Vec2 lib = mass_matrix(p, st) * qdd + coriolis_matrix(p, st) * qd + gravity_vector(p, st);
    worst = std::max(worst, inf_norm(lib - detail::direct_torque(p, q, qd, qdd)));
  }
  return detail::result("torque model vs direct equations", worst < tol,
                        std::to_string(trials) + " states, max abs error " + detail::sci(worst) +
                            " (tol " + detail::sci(tol) + ")");
}

/// Cartesian equation of motion residual |Mx xdd + Cx xdot + Gx + Fx - (fc + fe)|
/// along a joint-space simulation, evaluated at every accepted step.
inline CheckResult cartesian_residual(SimConfig cfg, double tol = 1e-6) {
  cfg.plant = PlantKind::manipulator;
  ClosedLoop loop(cfg);
  SimState y = loop.initial_state();
  ControllerMemory mem;
  loop.commit(0.0, y, mem);
  const auto n = static_cast<long>(std::llround(cfg.duration / cfg.dt));
  double worst = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double t = k * cfg.dt;
    const Evaluation ev = loop.evaluate(t, y, mem);
    const Vec2 fe = cfg.force_on_robot ? ev.fe : Vec2::Zero();
    const Vec2 res = ev.model.Mx * ev.xdd + ev.model.Cx * ev.xdot + ev.model.Gx + ev.model.Fx -
                     (ev.control.force + fe);
    worst = std::max(worst, inf_norm(res));
    if (k == n) break;
    y = loop.rk4(t, y, mem);
    loop.commit(t + cfg.dt, y, mem);
  }
  return detail::result("cartesian residual along trajectory", worst < tol,
                        std::string(to_string(cfg.controller.kind)) + " over " +
                            std::to_string(cfg.duration) + " s, max residual " + detail::sci(worst) +
                            " N (tol " + detail::sci(tol) + ")");
}

/// Kinetic energy drift of the unforced, gravity-free, disturbance-free arm.
inline CheckResult energy_drift(RobotParams p, std::uint64_t seed, double duration = 10.0,
                                double dt = 1e-4, double tol = 1e-6) {
  p.g = 0.0;
  std::mt19937_64 rng(seed + 4);
  std::uniform_real_distribution<double> uq(0.3, 2.8), uv(-1.0, 1.0);
  struct S {
    Vec2 q, qd;
  };
  S s{{uq(rng), uq(rng)}, {uv(rng), uv(rng)}};
  auto energy = [&p](const S& x) {
    return 0.5 * x.qd.dot(mass_matrix(p, JointState{x.q, x.qd}) * x.qd);
  };
  const double e0 = energy(s);
  auto f = [&p](const S& x) {
    const JointState js{x.q, x.qd};
    return S{x.qd, forward_dynamics(p, js, Vec2::Zero(), Vec2::Zero(), Vec2::Zero())};
  };
  const auto n = static_cast<long>(std::llround(duration / dt));
  double worst = 0.0;
  for (long k = 0; k < n; ++k) {
    const S k1 = f(s);
    const S k2 = f(S{s.q + 0.5 * dt * k1.q, s.qd + 0.5 * dt * k1.qd});
    const S k3 = f(S{s.q + 0.5 * dt * k2.q, s.qd + 0.5 * dt * k2.qd});
    const S k4 = f(S{s.q + dt * k3.q, s.qd + dt * k3.qd});
    s.q += dt / 6.0 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q);
    s.qd += dt / 6.0 * (k1.qd + 2 * k2.qd + 2 * k3.qd + k4.qd);
    worst = std::max(worst, std::abs(energy(s) - e0) / e0);
  }
  return detail::result("passive kinetic energy drift", worst < tol,
                        std::to_string(duration) + " s at dt " + detail::sci(dt) +
                            ", max relative drift " + detail::sci(worst) + " (tol " +
                            detail::sci(tol) + ")");
}

/// Jump of the human force profile across each breakpoint.
inline CheckResult force_continuity(const ForceProfile& fp, double tol = 1e-12) {
  double worst = 0.0;
  for (double tb : {fp.t_on, fp.t_full, fp.t_rampdown, fp.t_off}) {
    const double before = std::nextafter(tb, -std::numeric_limits<double>::infinity());
    worst = std::max(worst, inf_norm(human_force(tb, fp) - human_force(before, fp)));
  }
  return detail::result("human force continuity", worst < tol,
                        "max jump " + detail::sci(worst) + " N (tol " + detail::sci(tol) + ")");
}

struct BoundTrial {
  double offset_norm = 0.0;
  std::optional<double> settling;
};

/// Zero-uncertainty task-space FTISMC+BSP runs from random Cartesian offsets.
/// Offsets have uniform norm in [r_min, r_max] and uniform direction.
inline std::vector<BoundTrial> bound_trials(SimConfig base, std::uint64_t seed, int trials,
                                            double r_min, double r_max, double horizon) {
  base.controller.kind = ControllerKind::ftismc_bsp;
  base.plant = PlantKind::task_space;
  base.disturbance = false;
  base.force_enabled = false;
  base.force_on_robot = false;
  base.duration = horizon;
  std::mt19937_64 rng(seed + 5);
  std::uniform_real_distribution<double> ur(r_min, r_max), ua(0.0, 2.0 * std::numbers::pi);
  std::vector<SimConfig> cfgs;
  std::vector<double> norms;
  for (int i = 0; i < trials; ++i) {
    const double r = ur(rng);
    const double a = ua(rng);
    SimConfig c = base;
    c.x0_offset = {r * std::cos(a), r * std::sin(a)};
    cfgs.push_back(c);
    norms.push_back(r);
  }
  std::vector<std::future<RunResult>> jobs;
  for (const auto& c : cfgs)
    jobs.push_back(std::async(std::launch::async, [c] { return run_scenario(c, RunOptions{true}); }));
  std::vector<BoundTrial> out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const RunResult r = jobs[i].get();
    BoundTrial tr;
    tr.offset_norm = norms[i];
    if (r.summary.status == RunStatus::ok)
      tr.settling = empirical_settling_time(r.log, base.settle_threshold);
    out.push_back(tr);
  }
  return out;
}

/// Every trial settles within T_s2 + T_r2 + T_n and max/min settling < `max_ratio`.
inline CheckResult bound_respect(const SimConfig& base, std::uint64_t seed, int trials = 20,
                                 double r_min = 0.01, double r_max = 5.0, double max_ratio = 2.0) {
  const BoundReport b = theoretical_bounds(base.controller);
  const auto res = bound_trials(base, seed, trials, r_min, r_max, 4.0 * b.total_thm2);
  bool within = true;
  double t_max = 0.0, t_min = std::numeric_limits<double>::infinity();
  double n_min = std::numeric_limits<double>::infinity(), n_max = 0.0;
  for (const auto& tr : res) {
    n_min = std::min(n_min, tr.offset_norm);
    n_max = std::max(n_max, tr.offset_norm);
    if (!tr.settling || *tr.settling > b.total_thm2) {
      within = false;
      continue;
    }
    t_max = std::max(t_max, *tr.settling);
    t_min = std::min(t_min, *tr.settling);
  }
  const double ratio = t_min > 0.0 ? t_max / t_min : std::numeric_limits<double>::infinity();
  std::ostringstream os;
  os << trials << " offsets with norm " << n_min << ".." << n_max << " m; settling " << t_min
     << ".." << t_max << " s vs bound " << b.total_thm2 << " s; max/min ratio " << ratio
     << " (limit " << max_ratio << ")";
  if (!within) os << "; some trial missed the bound";
  return detail::result("fixed-time bound respect", within && ratio < max_ratio, os.str());
}

/// sigma(0) == 0 and, with uncertainties zeroed, sigma stays at numerical zero,
/// for each ISMC variant over random initial joint states.
inline CheckResult reaching_phase(SimConfig base, std::uint64_t seed, int states = 50,
                                  double horizon = 1.0, double tol0 = 1e-12, double tol = 1e-6) {
  base.disturbance = false;
  base.force_on_robot = false;
  base.duration = horizon;
  base.plant = PlantKind::manipulator;
  struct Variant {
    ControllerKind kind;
    SurfaceKind surface;
  };
  const Variant variants[] = {{ControllerKind::ismc_pid, SurfaceKind::linear},
                              {ControllerKind::ismc_ctc, SurfaceKind::linear},
                              {ControllerKind::ismc_bsp, SurfaceKind::linear},
                              {ControllerKind::ftismc_bsp, SurfaceKind::nonsingular},
                              {ControllerKind::ftismc_bsp, SurfaceKind::fixed_time}};
  std::mt19937_64 rng(seed + 6);
  std::uniform_real_distribution<double> dq(-0.3, 0.3), dv(-0.5, 0.5);
  std::vector<std::pair<Vec2, Vec2>> inits;
  for (int i = 0; i < states; ++i)
    inits.push_back({base.q0 + Vec2(dq(rng), dq(rng)), Vec2(dv(rng), dv(rng))});

  bool ok = true;
  std::ostringstream os;
  for (const auto& v : variants) {
    std::vector<std::future<RunResult>> jobs;
    for (const auto& [q0, qd0] : inits) {
      SimConfig c = base;
      c.controller.kind = v.kind;
      if (v.kind == ControllerKind::ftismc_bsp) c.controller.ftismc_surface = v.surface;
      c.q0 = q0;
      c.qd0 = qd0;
      jobs.push_back(std::async(std::launch::async, [c] { return run_scenario(c, RunOptions{true}); }));
    }
    double s0 = 0.0, smax = 0.0;
    int aborted = 0;
    for (auto& j : jobs) {
      const RunResult r = j.get();
      if (r.summary.status != RunStatus::ok) ++aborted;
      s0 = std::max(s0, r.summary.sigma0);
      smax = std::max(smax, r.summary.max_abs_sigma);
    }
    const bool pass = aborted == 0 && s0 < tol0 && smax < tol;
    ok = ok && pass;
    os << (os.tellp() > 0 ? "; " : "") << to_string(v.kind);
    if (v.kind == ControllerKind::ftismc_bsp) os << "/" << (v.surface == SurfaceKind::nonsingular ? "ns" : "ft");
    os << ": |sigma(0)| " << detail::sci(s0) << ", max|sigma| " << detail::sci(smax);
    if (aborted) os << ", " << aborted << " aborted";
  }
  return detail::result("reaching-phase elimination", ok, os.str());
}

/// All suites with the default scenario.
inline std::vector<CheckResult> all(const SimConfig& base, std::uint64_t seed) {
  const RobotParams p = base.effective_robot();
  SimConfig residual = base;
  residual.controller.kind = ControllerKind::ftismc_bsp;
  residual.duration = std::min(base.duration, 12.0);
  return {power_mean_lower_bound(seed),
          power_sum_lower_bound(seed),
          scalar_fixed_time_settling(FixedTimeGains(1, 1, 0.5, 2), {0.1, -0.1, 10, -10, 1000, -1000}),
          jacobian_fd(p, seed),
          torque_model(p, seed),
          cartesian_residual(residual),
          energy_drift(base.robot, seed),
          force_continuity(base.force),
          bound_respect(base, seed),
          reaching_phase(base, seed)};
}

}  // namespace ftismc::verify
