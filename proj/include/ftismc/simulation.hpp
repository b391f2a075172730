#pragma once

// Fixed-step closed-loop simulation of manipulator + admittance filter + controller.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ftismc/admittance.hpp"
#include "ftismc/analysis.hpp"
#include "ftismc/controllers.hpp"
#include "ftismc/integrator.hpp"
#include "ftismc/log.hpp"
#include "ftismc/manipulator.hpp"
#include "ftismc/types.hpp"

namespace ftismc {

enum class PlantKind {
  manipulator,  // two-link arm integrated in joint space
  task_space    // Cartesian double integrator with the model frozen at q0
};

struct SimConfig {
  RobotParams robot;
  bool gravity = true;
  bool disturbance = true;

  AdmittanceParams admittance;
  ForceProfile force;
  bool force_enabled = true;   // human force drives the admittance filter
  bool force_on_robot = true;  // human force also acts on the end effector

  ControllerConfig controller;

  double dt = 1e-4;
  double duration = 30.0;
  int decimation = 10;
  bool zoh = false;  // hold the control over each step instead of evaluating it per stage
  Vec2 q0{0.5236, 2.0944};
  Vec2 qd0 = Vec2::Zero();
  PlantKind plant = PlantKind::manipulator;
  Vec2 x0_offset = Vec2::Zero();  // task_space only: x(0) = x_d(0) + offset, xdot(0) = 0
  double singularity_threshold = kDefaultSingularityThreshold;
  double transient = 2.0;          // start of the post-transient metric window (s)
  double settle_threshold = 1e-4;  // m
  std::string output;
  std::uint64_t seed = 0;

  RobotParams effective_robot() const {
    RobotParams p = robot;
    if (!gravity) p.g = 0.0;
    return p;
  }

  void validate() const {
    robot.validate();
    admittance.validate();
    force.validate();
    controller.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
    if (!(duration > dt)) throw std::invalid_argument("SimConfig: duration must exceed dt");
    if (decimation < 1) throw std::invalid_argument("SimConfig: decimation must be >= 1");
    if (!(singularity_threshold > 0.0))
      throw std::invalid_argument("SimConfig: singularity_threshold must be positive");
    if (!(settle_threshold > 0.0))
      throw std::invalid_argument("SimConfig: settle_threshold must be positive");
    if (!all_finite(q0) || !all_finite(qd0) || !all_finite(x0_offset))
      throw std::invalid_argument("SimConfig: initial state must be finite");
  }
};

/// Continuous ODE state. For the task_space plant, q/qd hold x/xdot.
struct SimState {
  Vec2 q = Vec2::Zero();
  Vec2 qd = Vec2::Zero();
  Vec2 xi = Vec2::Zero();
  Vec2 xid = Vec2::Zero();
  Vec2 sigma = Vec2::Zero();
  Vec2 pid_int = Vec2::Zero();

  static constexpr const char* kComponentNames[] = {"q", "qd", "xi", "xid", "sigma", "pid_int"};

  const Vec2& component(int i) const {
    const Vec2* c[] = {&q, &qd, &xi, &xid, &sigma, &pid_int};
    return *c[i];
  }
};

inline SimState operator+(const SimState& a, const SimState& b) {
  return {a.q + b.q, a.qd + b.qd, a.xi + b.xi, a.xid + b.xid, a.sigma + b.sigma, a.pid_int + b.pid_int};
}

inline SimState operator*(double h, const SimState& a) {
  return {h * a.q, h * a.qd, h * a.xi, h * a.xid, h * a.sigma, h * a.pid_int};
}

/// Discrete controller memory carried between accepted steps.
struct ControllerMemory {
  Vec2 alpha_s_prev = Vec2::Zero();
  Vec2 alpha_s_dot = Vec2::Zero();  // backward difference; 0 at t = 0
  bool has_prev = false;
  std::optional<ControlOutput> held;  // zero-order-hold mode
};

/// One evaluation of the closed-loop right-hand side with its diagnostics.
struct Evaluation {
  SimState rate;
  ControlOutput control;
  Reference desired;
  Reference ref;
  CartesianModel model;
  Vec2 x;
  Vec2 xdot;
  Vec2 xdd;
  Vec2 fe;
  Vec2 tau_c;
  Vec2 psi;
};

class ClosedLoop {
 public:
  explicit ClosedLoop(SimConfig cfg)
      : cfg_(std::move(cfg)), robot_(cfg_.effective_robot()), controller_(cfg_.controller) {
    cfg_.validate();
    needs_model_ = cfg_.controller.kind != ControllerKind::pid;
    if (cfg_.plant == PlantKind::task_space) {
      JointState rest{cfg_.q0, Vec2::Zero()};
      const Vec2 dist = cfg_.disturbance ? disturbance_vector(rest) : Vec2::Zero();
      frozen_ = cartesian_model(robot_, rest, dist, cfg_.singularity_threshold);
    }
  }

  const SimConfig& config() const noexcept { return cfg_; }
  const RobotParams& robot() const noexcept { return robot_; }
  const Controller& controller() const noexcept { return controller_; }

  SimState initial_state() const {
    SimState s;
    if (cfg_.plant == PlantKind::manipulator) {
      s.q = cfg_.q0;
      s.qd = cfg_.qd0;
    } else {
      s.q = desired_trajectory(0.0).xr + cfg_.x0_offset;
      s.qd = Vec2::Zero();
    }
    return s;
  }

  Vec2 human_force_at(double t) const {
    return cfg_.force_enabled ? human_force(t, cfg_.force) : Vec2::Zero();
  }

  /// Full right-hand side. Throws SingularityError near det(J) = 0.
  Evaluation evaluate(double t, const SimState& y, const ControllerMemory& mem) const {
    Evaluation ev;
    ev.fe = human_force_at(t);
    const Vec2 fe_robot = cfg_.force_on_robot ? ev.fe : Vec2::Zero();

    JointState js{y.q, y.qd};
    Vec2 dist = Vec2::Zero();
    if (cfg_.plant == PlantKind::manipulator) {
      if (cfg_.disturbance) dist = disturbance_vector(js);
      if (needs_model_) {
        ev.model = cartesian_model(robot_, js, dist, cfg_.singularity_threshold);
      } else {
        ev.model = joint_only_model(js, dist);
      }
      ev.x = forward_kinematics(robot_, js);
      ev.xdot = ev.model.J * y.qd;
    } else {
      ev.model = *frozen_;
      ev.x = y.q;
      ev.xdot = y.qd;
    }

    AdmittanceState adm{y.xi, y.xid};
    ev.desired = desired_trajectory(t);
    ev.ref = reference(t, adm, ev.fe, cfg_.admittance);

    if (mem.held) {
      ev.control = *mem.held;
    } else {
      ControlContext ctx{ev.x, ev.xdot, ev.ref, ev.model, y.sigma, y.pid_int, mem.alpha_s_dot};
      ev.control = controller_.evaluate(ctx);
    }
    ev.tau_c = cartesian_to_joint_torque(ev.control.force, ev.model.J);
    ev.psi = lumped_uncertainty(ev.model, fe_robot);

    if (cfg_.plant == PlantKind::manipulator) {
      const Vec2 tau_e = cartesian_to_joint_torque(fe_robot, ev.model.J);
      const Vec2 qdd = forward_dynamics(robot_, js, ev.tau_c, tau_e, dist);
      ev.rate.q = y.qd;
      ev.rate.qd = qdd;
      ev.xdd = ev.model.J * qdd + jacobian_time_derivative(robot_, js) * y.qd;
    } else {
      ev.xdd = ev.model.Xi * ev.control.force + ev.model.Gamma + ev.psi;
      ev.rate.q = y.qd;
      ev.rate.qd = ev.xdd;
    }
    ev.rate.xi = y.xid;
    ev.rate.xid = admittance_accel(adm, ev.fe, cfg_.admittance);
    ev.rate.sigma = cfg_.controller.surface() == SurfaceKind::none
                        ? Vec2::Zero()
                        : sigma_rate(ev.control.sigma_weight, ev.model, ev.control.force,
                                     ev.control.u0, ev.psi);
    ev.rate.pid_int = ev.control.integral_rate;
    return ev;
  }

  SimState derivative(double t, const SimState& y, const ControllerMemory& mem) const {
    SimState r = evaluate(t, y, mem).rate;
    for (int i = 0; i < 6; ++i)
      if (!all_finite(r.component(i)))
        throw NonFiniteError(std::string("non-finite derivative in component ") +
                             SimState::kComponentNames[i] + " at t = " + std::to_string(t));
    return r;
  }

  SimState rk4(double t, const SimState& y, const ControllerMemory& mem) const {
    return rk4_step([&](double tt, const SimState& yy) { return derivative(tt, yy, mem); }, t, y,
                    cfg_.dt);
  }

  /// Backstepping virtual control at a state; zero for non-backstepping nominals.
  Vec2 alpha_s_at(double t, const SimState& y) const {
    if (nominal_of(cfg_.controller.kind) != NominalKind::bsp) return Vec2::Zero();
    Vec2 x;
    if (cfg_.plant == PlantKind::manipulator) {
      x = forward_kinematics(robot_, JointState{y.q, y.qd});
    } else {
      x = y.q;
    }
    const Reference ref = reference(t, AdmittanceState{y.xi, y.xid}, human_force_at(t), cfg_.admittance);
    return bsp_stabilizing(x - ref.xr, ref, cfg_.controller.bsp);
  }

  /// Refresh the step-matched backward difference of alpha_s.
  void commit(double t, const SimState& y, ControllerMemory& mem) const {
    const Vec2 a = alpha_s_at(t, y);
    if (mem.has_prev) mem.alpha_s_dot = (a - mem.alpha_s_prev) / cfg_.dt;
    mem.alpha_s_prev = a;
    mem.has_prev = true;
  }

 private:
  // Bare PID never inverts J, so it may pass near-singular poses. The Cartesian
  // terms are filled when J is invertible and left NaN otherwise (the Psi
  // witness is then undefined for that row).
  CartesianModel joint_only_model(const JointState& js, const Vec2& dist) const {
    try {
      return cartesian_model(robot_, js, dist, cfg_.singularity_threshold);
    } catch (const SingularityError&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      CartesianModel m;
      m.Mx = m.Cx = m.Xi = Mat2::Constant(nan);
      m.Gx = m.Fx = m.Gamma = Vec2::Constant(nan);
      m.J = jacobian(robot_, js);
      m.detJ = det2(m.J);
      return m;
    }
  }

  SimConfig cfg_;
  RobotParams robot_;
  Controller controller_;
  bool needs_model_ = true;
  std::optional<CartesianModel> frozen_;
};

// ---------------------------------------------------------------------------
// Logged run

inline LogRow make_row(double t, const SimState& y, const Evaluation& ev) {
  LogRow r;
  r.t = t;
  r.q = y.q;
  r.qd = y.qd;
  r.x = ev.x;
  r.xdot = ev.xdot;
  r.xd = ev.desired.xr;
  r.xr = ev.ref.xr;
  r.xrdot = ev.ref.xrd;
  r.e = ev.control.e;
  r.fc = ev.control.force;
  r.tau_c = ev.tau_c;
  r.fe = ev.fe;
  r.s = ev.control.s;
  r.sigma = ev.control.sigma;
  r.u0 = ev.control.u0;
  r.us = ev.control.us;
  r.det_j = ev.model.detJ;
  r.psi_inf = inf_norm(ev.psi);
  return r;
}

enum class RunStatus { ok, singular, non_finite };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::singular: return "singular";
    case RunStatus::non_finite: return "non_finite";
  }
  return "?";
}

struct RunSummary {
  RunStatus status = RunStatus::ok;
  std::string message;
  double t_end = 0.0;
  std::size_t steps = 0;
  Vec2 rmse = Vec2::Zero();            // full horizon
  Vec2 rmse_post = Vec2::Zero();       // t >= transient
  double max_abs_e_post = 0.0;         // inf-norm, t >= transient
  std::optional<double> settling_time;
  double max_psi = 0.0;
  bool rho_ok = true;
  double chattering_index = 0.0;  // mean |delta tau_c|_inf per step over the force plateau
  double max_ref_offset = 0.0;    // max |xr - xd|_inf
  double max_abs_sigma = 0.0;
  double sigma0 = 0.0;            // |sigma(0)|_inf
};

struct RunResult {
  std::vector<LogRow> log;
  RunSummary summary;
};

struct RunOptions {
  bool keep_every_step = false;  // log every accepted step instead of every `decimation`
};

/// Summary metrics over a log.
inline RunSummary summarize(const std::vector<LogRow>& log, const SimConfig& cfg) {
  RunSummary s;
  if (log.empty()) return s;
  s.rmse = rmse(log);
  if (log.back().t >= cfg.transient) s.rmse_post = rmse(log, cfg.transient);
  s.settling_time = empirical_settling_time(log, cfg.settle_threshold);
  s.sigma0 = inf_norm(log.front().sigma);
  for (const auto& r : log) {
    s.max_ref_offset = std::max(s.max_ref_offset, inf_norm(r.xr - r.xd));
    s.max_abs_sigma = std::max(s.max_abs_sigma, inf_norm(r.sigma));
    if (r.t >= cfg.transient) s.max_abs_e_post = std::max(s.max_abs_e_post, inf_norm(r.e));
  }
  return s;
}

inline RunResult run_scenario(const SimConfig& cfg, RunOptions opts = {}) {
  ClosedLoop loop(cfg);
  const double dt = cfg.dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration / dt));
  const int decim = opts.keep_every_step ? 1 : cfg.decimation;

  RunResult res;
  res.log.reserve(n_steps / static_cast<std::size_t>(decim) + 2);

  SimState y = loop.initial_state();
  ControllerMemory mem;
  double chatter_sum = 0.0;
  std::size_t chatter_n = 0;
  std::optional<Vec2> prev_tau;
  double max_psi = 0.0;
  double max_sigma = 0.0;

  std::size_t k = 0;
  double t = 0.0;
  try {
    loop.commit(t, y, mem);
    for (;; ++k) {
      t = static_cast<double>(k) * dt;
      const Evaluation ev = loop.evaluate(t, y, mem);
      max_psi = std::max(max_psi, inf_norm(ev.psi));
      max_sigma = std::max(max_sigma, inf_norm(y.sigma));
      if (t >= cfg.force.t_full && t < cfg.force.t_rampdown) {
        if (prev_tau) {
          chatter_sum += inf_norm(ev.tau_c - *prev_tau);
          ++chatter_n;
        }
        prev_tau = ev.tau_c;
      }
      if (k % static_cast<std::size_t>(decim) == 0 || k == n_steps) res.log.push_back(make_row(t, y, ev));
      if (k == n_steps) break;

      if (cfg.zoh) mem.held = ev.control;
      y = loop.rk4(t, y, mem);
      mem.held.reset();
      loop.commit(t + dt, y, mem);
    }
  } catch (const SingularityError& err) {
    res.summary.status = RunStatus::singular;
    res.summary.message = err.what();
  } catch (const NonFiniteError& err) {
    res.summary.status = RunStatus::non_finite;
    res.summary.message = err.what();
  }

  RunSummary metrics = summarize(res.log, cfg);
  metrics.status = res.summary.status;
  metrics.message = res.summary.message;
  metrics.t_end = res.log.empty() ? 0.0 : res.log.back().t;
  metrics.steps = k;
  metrics.max_psi = max_psi;
  metrics.rho_ok = max_psi <= cfg.controller.comp.rho;
  metrics.max_abs_sigma = max_sigma;
  metrics.chattering_index = chatter_n ? chatter_sum / static_cast<double>(chatter_n) : 0.0;
  res.summary = metrics;
  return res;
}

}  // namespace ftismc
