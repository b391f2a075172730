#pragma once

// Task-space control laws: PID, computed torque, fixed-time backstepping, and
// the integral sliding mode wrappers around them. Every law returns a Cartesian
// force; cartesian_to_joint_torque maps it to joint torques.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ftismc/admittance.hpp"
#include "ftismc/fxmath.hpp"
#include "ftismc/manipulator.hpp"
#include "ftismc/types.hpp"

namespace ftismc {

enum class ControllerKind { pid, ctc, bsp, ismc_pid, ismc_ctc, ismc_bsp, ftismc_bsp };
enum class NominalKind { pid, ctc, bsp };
enum class SurfaceKind { none, linear, fixed_time, nonsingular };

inline constexpr ControllerKind kBenchmarkControllers[] = {
    ControllerKind::pid,      ControllerKind::ctc,      ControllerKind::ismc_pid,
    ControllerKind::ismc_ctc, ControllerKind::ismc_bsp, ControllerKind::ftismc_bsp};

inline std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::pid: return "pid";
    case ControllerKind::ctc: return "ctc";
    case ControllerKind::bsp: return "bsp";
    case ControllerKind::ismc_pid: return "ismc_pid";
    case ControllerKind::ismc_ctc: return "ismc_ctc";
    case ControllerKind::ismc_bsp: return "ismc_bsp";
    case ControllerKind::ftismc_bsp: return "ftismc_bsp";
  }
  return "?";
}

inline std::optional<ControllerKind> parse_controller_kind(std::string_view name) {
  for (auto k : {ControllerKind::pid, ControllerKind::ctc, ControllerKind::bsp,
                 ControllerKind::ismc_pid, ControllerKind::ismc_ctc, ControllerKind::ismc_bsp,
                 ControllerKind::ftismc_bsp})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

inline NominalKind nominal_of(ControllerKind k) {
  switch (k) {
    case ControllerKind::pid:
    case ControllerKind::ismc_pid: return NominalKind::pid;
    case ControllerKind::ctc:
    case ControllerKind::ismc_ctc: return NominalKind::ctc;
    default: return NominalKind::bsp;
  }
}

inline bool is_ismc(ControllerKind k) {
  return k == ControllerKind::ismc_pid || k == ControllerKind::ismc_ctc ||
         k == ControllerKind::ismc_bsp || k == ControllerKind::ftismc_bsp;
}

// ---------------------------------------------------------------------------
// Gains

namespace detail {
inline void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace detail

struct PidGains {
  double kp = 300.0;
  double kd = 400.0;
  double ki = 10.0;
  double integral_clamp = 10.0;  // anti-windup limit on each integral component

  void validate() const {
    detail::require(kp >= 0 && kd >= 0 && ki >= 0, "PidGains: gains must be non-negative");
    detail::require(integral_clamp > 0, "PidGains: integral_clamp must be positive");
  }
};

struct CtcGains {
  double kp = 300.0;
  double kd = 400.0;

  void validate() const { detail::require(kp > 0 && kd > 0, "CtcGains: kp, kd must be positive"); }
};

struct BspGains {
  double lambda1 = 3.0;
  double lambda2 = 20.0;
  double lambda3 = 50.0;
  double alpha = 5.0 / 7.0;
  double beta = 5.0 / 3.0;

  void validate() const {
    detail::require(lambda1 > 0 && lambda2 > 0 && lambda3 > 0, "BspGains: lambdas must be positive");
    detail::require(alpha > 0 && alpha < 1, "BspGains: alpha must lie in (0, 1)");
    detail::require(beta > 1, "BspGains: beta must exceed 1");
  }
};

struct FtSurfaceGains {
  double k1 = 20.0;
  double k2 = 50.0;
  double alpha = 5.0 / 7.0;
  double beta = 5.0 / 3.0;

  void validate() const {
    detail::require(k1 > 0 && k2 > 0, "FtSurfaceGains: k1, k2 must be positive");
    detail::require(alpha > 0 && alpha < 1, "FtSurfaceGains: alpha must lie in (0, 1)");
    detail::require(beta > 1, "FtSurfaceGains: beta must exceed 1");
  }
};

struct NsSurfaceGains {
  double k5 = 20.0;
  double k6 = 50.0;
  double m = 5.0 / 7.0;
  double n = 5.0 / 3.0;

  void validate() const {
    detail::require(k5 > 0 && k6 > 0, "NsSurfaceGains: k5, k6 must be positive");
    detail::require(m > 0 && m < 1, "NsSurfaceGains: m must lie in (0, 1)");
    detail::require(n > 1, "NsSurfaceGains: n must exceed 1");
  }
};

struct CompensatorGains {
  double rho = 30.0;
  double epsilon = 0.1;
  double k3 = 20.0;
  double k4 = 50.0;
  double p_exp = 5.0 / 7.0;
  double q_exp = 5.0 / 3.0;
  double boundary_layer = 0.0;  // 0 selects the pure sign function

  void validate() const {
    detail::require(rho >= 0, "CompensatorGains: rho must be non-negative");
    detail::require(epsilon > 0, "CompensatorGains: epsilon must be positive");
    detail::require(k3 > 0 && k4 > 0, "CompensatorGains: k3, k4 must be positive");
    detail::require(p_exp > 0 && p_exp < 1, "CompensatorGains: p must lie in (0, 1)");
    detail::require(q_exp > 1, "CompensatorGains: q must exceed 1");
    detail::require(boundary_layer >= 0, "CompensatorGains: boundary_layer must be non-negative");
  }
};

struct LinearSurfaceGains {
  double c = 10.0;

  void validate() const { detail::require(c > 0, "LinearSurfaceGains: c must be positive"); }
};

// ---------------------------------------------------------------------------
// Nominal laws

/// u = -(kp e + kd ed + ki int(e)); the integral is clamped to +/- integral_clamp.
inline Vec2 pid(const Vec2& e, const Vec2& e_dot, const Vec2& e_int, const PidGains& g) {
  const Vec2 ic = e_int.cwiseMax(-g.integral_clamp).cwiseMin(g.integral_clamp);
  return -(g.kp * e + g.kd * e_dot + g.ki * ic);
}

/// Conditional integration: a component stops integrating once it sits at the
/// clamp and the error would push it further out.
inline Vec2 pid_integral_rate(const Vec2& e, const Vec2& e_int, const PidGains& g) {
  Vec2 r = e;
  for (int i = 0; i < 2; ++i)
    if (std::abs(e_int[i]) >= g.integral_clamp && e[i] * e_int[i] > 0.0) r[i] = 0.0;
  return r;
}

/// fc = Mx (xr_dd - kd ed - kp e) + Cx xdot + Gx.
inline Vec2 ctc(const Vec2& e, const Vec2& e_dot, const Vec2& xdot, const Reference& ref,
                const CartesianModel& model, const CtcGains& g) {
  return model.Mx * (ref.xrdd - g.kd * e_dot - g.kp * e) + model.Cx * xdot + model.Gx;
}

/// alpha_s = -(l1 s1 + l2 [s1]^alpha + l3 [s1]^beta) + xr_dot.
inline Vec2 bsp_stabilizing(const Vec2& s1, const Reference& ref, const BspGains& g) {
  return -(g.lambda1 * s1 + g.lambda2 * signed_power(s1, g.alpha) +
           g.lambda3 * signed_power(s1, g.beta)) +
         ref.xrd;
}

struct BspTerms {
  Vec2 alpha_s;
  Vec2 s2;
  Vec2 u0;
};

/// u0 = Xi^-1 (-Gamma + alpha_s_dot - l1 s2 - l2 [s2]^alpha - l3 [s2]^beta), s2 = xdot - alpha_s.
inline BspTerms bsp_nominal(const Vec2& e, const Vec2& xdot, const Reference& ref,
                            const CartesianModel& model, const BspGains& g,
                            const Vec2& alpha_s_dot) {
  BspTerms t;
  t.alpha_s = bsp_stabilizing(e, ref, g);
  t.s2 = xdot - t.alpha_s;
  const Vec2 shaped = -model.Gamma + alpha_s_dot - g.lambda1 * t.s2 -
                      g.lambda2 * signed_power(t.s2, g.alpha) -
                      g.lambda3 * signed_power(t.s2, g.beta);
  t.u0 = model.Mx * shaped;
  return t;
}

// ---------------------------------------------------------------------------
// Sliding surfaces

/// s = ed + k1 [e]^alpha + k2 [e]^beta.
inline Vec2 ft_surface(const Vec2& e, const Vec2& e_dot, const FtSurfaceGains& g) {
  return e_dot + g.k1 * signed_power(e, g.alpha) + g.k2 * signed_power(e, g.beta);
}

/// Coefficient multiplying [w]^(1/m) in the nonsingular surface. k5^(-1/m)
/// makes s = 0 equivalent to ed = -k5 [e]^m - k6 [e]^n.
inline double ns_coefficient(const NsSurfaceGains& g) { return std::pow(g.k5, -1.0 / g.m); }

/// Inner term w = ed + k6 [e]^n.
inline Vec2 ns_inner(const Vec2& e, const Vec2& e_dot, const NsSurfaceGains& g) {
  return e_dot + g.k6 * signed_power(e, g.n);
}

/// s = e + k5^(-1/m) [ed + k6 [e]^n]^(1/m).
inline Vec2 ns_surface(const Vec2& e, const Vec2& e_dot, const NsSurfaceGains& g) {
  return e + ns_coefficient(g) * signed_power(ns_inner(e, e_dot, g), 1.0 / g.m);
}

/// T1 = (1/m) k5^(-1/m) |w|^(1/m - 1), elementwise; non-negative and free of
/// negative powers because 1/m - 1 > 0.
inline Vec2 ns_t1(const Vec2& e, const Vec2& e_dot, const NsSurfaceGains& g) {
  return (ns_coefficient(g) / g.m) * abs_power(ns_inner(e, e_dot, g), 1.0 / g.m - 1.0);
}

/// T2 = k6 n |e|^(n-1) ed.
inline Vec2 ns_t2(const Vec2& e, const Vec2& e_dot, const NsSurfaceGains& g) {
  return (g.k6 * g.n) * abs_power(e, g.n - 1.0).cwiseProduct(e_dot);
}

/// s = ed + c e.
inline Vec2 linear_surface(const Vec2& e, const Vec2& e_dot, const LinearSurfaceGains& g) {
  return e_dot + g.c * e;
}

// ---------------------------------------------------------------------------
// Integral surfaces

/// Nominal-part integrand of the fixed-time integral surface:
/// Xi u0 + Gamma - xr_dd + k1 alpha |e|^(alpha-1) ed + k2 beta |e|^(beta-1) ed.
/// |e| is floored at `floor` in the singular alpha term; `floor_hit` reports it.
struct Sigma1Integrand {
  Vec2 value;
  bool floor_hit = false;
};

inline Sigma1Integrand sigma1_integrand(const Vec2& e, const Vec2& e_dot, const Reference& ref,
                                        const CartesianModel& model, const Vec2& u0,
                                        const FtSurfaceGains& g, double floor) {
  Sigma1Integrand out;
  out.floor_hit = (e.array().abs() < floor).any() && (e_dot.array() != 0.0).any();
  out.value = model.Xi * u0 + model.Gamma - ref.xrdd +
              (g.k1 * g.alpha) * abs_power(e, g.alpha - 1.0, floor).cwiseProduct(e_dot) +
              (g.k2 * g.beta) * abs_power(e, g.beta - 1.0).cwiseProduct(e_dot);
  return out;
}

/// Nominal-part integrand of the nonsingular integral surface: ed + T1 (Xi u0 + Gamma - xr_dd + T2).
inline Vec2 sigma2_integrand(const Vec2& e, const Vec2& e_dot, const Reference& ref,
                             const CartesianModel& model, const Vec2& u0, const NsSurfaceGains& g) {
  return e_dot + ns_t1(e, e_dot, g).cwiseProduct(model.Xi * u0 + model.Gamma - ref.xrdd +
                                                 ns_t2(e, e_dot, g));
}

/// Rate of an integral surface sigma = s - s(0) - int(nominal part): the true
/// surface rate minus its nominal part. The plant acceleration is written as
/// Xi u + Gamma + Psi, so the rate is weight * (Xi (u - u0) + Psi), with the
/// weight equal to 1 for the linear and fixed-time surfaces and T1 for the
/// nonsingular one. With u == u0 and Psi == 0 the result is exactly zero.
inline Vec2 sigma_rate(const Vec2& weight, const CartesianModel& model, const Vec2& u,
                       const Vec2& u0, const Vec2& psi) {
  const Vec2 plant = model.Xi * u + model.Gamma + psi;
  const Vec2 nominal = model.Xi * u0 + model.Gamma;
  return weight.cwiseProduct(plant - nominal);
}

/// Switching function: sign, or the saturated variant when width > 0.
inline Vec2 switching(const Vec2& sigma, double width) {
  return width > 0.0 ? saturated_sign(sigma, width) : sign(sigma);
}

/// us = Xi^-1 (-(rho + eps) sign(sigma) - k3 [sigma]^p - k4 [sigma]^q).
inline Vec2 compensator(const Vec2& sigma, const CartesianModel& model, const CompensatorGains& g) {
  const Vec2 v = -(g.rho + g.epsilon) * switching(sigma, g.boundary_layer) -
                 g.k3 * signed_power(sigma, g.p_exp) - g.k4 * signed_power(sigma, g.q_exp);
  return model.Mx * v;
}

/// us = Xi^-1 (-(rho + eps) sign(sigma)): reaching law of the linear ISMC baselines.
inline Vec2 linear_reaching(const Vec2& sigma, const CartesianModel& model,
                            const CompensatorGains& g) {
  return model.Mx * (-(g.rho + g.epsilon) * switching(sigma, g.boundary_layer));
}

// ---------------------------------------------------------------------------
// Composite controller

struct ControllerConfig {
  ControllerKind kind = ControllerKind::ftismc_bsp;
  PidGains pid;
  CtcGains ctc;
  BspGains bsp;
  FtSurfaceGains ft;
  NsSurfaceGains ns;
  CompensatorGains comp;
  LinearSurfaceGains linear;
  SurfaceKind ftismc_surface = SurfaceKind::nonsingular;  // fixed_time selects sigma1
  double error_floor = 1e-8;

  void validate() const {
    pid.validate();
    ctc.validate();
    bsp.validate();
    ft.validate();
    ns.validate();
    comp.validate();
    linear.validate();
    detail::require(ftismc_surface == SurfaceKind::nonsingular ||
                        ftismc_surface == SurfaceKind::fixed_time,
                    "ControllerConfig: ftismc surface must be nonsingular or fixed_time");
    detail::require(error_floor > 0, "ControllerConfig: error_floor must be positive");
  }

  SurfaceKind surface() const {
    if (!is_ismc(kind)) return SurfaceKind::none;
    return kind == ControllerKind::ftismc_bsp ? ftismc_surface : SurfaceKind::linear;
  }
};

/// Everything a control law may read at one instant.
struct ControlContext {
  Vec2 x;
  Vec2 xdot;
  Reference ref;
  CartesianModel model;
  Vec2 sigma = Vec2::Zero();         // integral surface state
  Vec2 pid_integral = Vec2::Zero();  // error integral state
  Vec2 alpha_s_dot = Vec2::Zero();   // held backstepping virtual-control rate
};

struct ControlOutput {
  Vec2 force = Vec2::Zero();  // u0 + us
  Vec2 u0 = Vec2::Zero();
  Vec2 us = Vec2::Zero();
  Vec2 s = Vec2::Zero();
  Vec2 sigma = Vec2::Zero();
  Vec2 e = Vec2::Zero();
  Vec2 e_dot = Vec2::Zero();
  Vec2 alpha_s = Vec2::Zero();
  Vec2 sigma_weight = Vec2::Zero();   // 0 when no integral surface is active
  Vec2 integral_rate = Vec2::Zero();  // PID error-integral rate
  bool omega1[2] = {false, false};    // T1 >= 1 per axis (nonsingular surface only)
  bool floor_hit = false;             // singular term regularised (fixed-time surface only)
};

class Controller {
 public:
  explicit Controller(ControllerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  const ControllerConfig& config() const noexcept { return cfg_; }

  ControlOutput evaluate(const ControlContext& c) const {
    ControlOutput out;
    out.e = c.x - c.ref.xr;
    out.e_dot = c.xdot - c.ref.xrd;

    switch (nominal_of(cfg_.kind)) {
      case NominalKind::pid:
        out.u0 = pid(out.e, out.e_dot, c.pid_integral, cfg_.pid);
        out.integral_rate = pid_integral_rate(out.e, c.pid_integral, cfg_.pid);
        break;
      case NominalKind::ctc:
        out.u0 = ctc(out.e, out.e_dot, c.xdot, c.ref, c.model, cfg_.ctc);
        break;
      case NominalKind::bsp: {
        const BspTerms b = bsp_nominal(out.e, c.xdot, c.ref, c.model, cfg_.bsp, c.alpha_s_dot);
        out.u0 = b.u0;
        out.alpha_s = b.alpha_s;
        break;
      }
    }

    out.sigma = c.sigma;
    switch (cfg_.surface()) {
      case SurfaceKind::none:
        break;
      case SurfaceKind::linear:
        out.s = linear_surface(out.e, out.e_dot, cfg_.linear);
        out.us = linear_reaching(c.sigma, c.model, cfg_.comp);
        out.sigma_weight = Vec2::Ones();
        break;
      case SurfaceKind::fixed_time:
        out.s = ft_surface(out.e, out.e_dot, cfg_.ft);
        out.us = compensator(c.sigma, c.model, cfg_.comp);
        out.sigma_weight = Vec2::Ones();
        out.floor_hit = (out.e.array().abs() < cfg_.error_floor).any() &&
                        (out.e_dot.array() != 0.0).any();
        break;
      case SurfaceKind::nonsingular: {
        out.s = ns_surface(out.e, out.e_dot, cfg_.ns);
        out.us = compensator(c.sigma, c.model, cfg_.comp);
        out.sigma_weight = ns_t1(out.e, out.e_dot, cfg_.ns);
        out.omega1[0] = out.sigma_weight[0] >= 1.0;
        out.omega1[1] = out.sigma_weight[1] >= 1.0;
        break;
      }
    }
    out.force = out.u0 + out.us;
    return out;
  }

 private:
  ControllerConfig cfg_;
};

}  // namespace ftismc
