#pragma once

// Two-link planar manipulator: joint-space model, kinematics and the
// joint <-> Cartesian transformations.

#include <cmath>
#include <stdexcept>

#include "ftismc/types.hpp"

namespace ftismc {

struct RobotParams {
  double m1 = 1.5;   // kg
  double m2 = 1.0;   // kg
  double l1 = 0.3;   // m
  double l2 = 0.3;   // m
  double g = 9.81;   // m/s^2

  void validate() const {
    if (!(m1 > 0.0 && m2 > 0.0)) throw std::invalid_argument("RobotParams: masses must be positive");
    if (!(l1 > 0.0 && l2 > 0.0)) throw std::invalid_argument("RobotParams: lengths must be positive");
    if (!(g >= 0.0)) throw std::invalid_argument("RobotParams: g must be non-negative");
  }
};

struct JointState {
  Vec2 q = Vec2::Zero();   // rad
  Vec2 qd = Vec2::Zero();  // rad/s
};

/// Task-space model at one configuration.
struct CartesianModel {
  Mat2 Mx;     // J^-T M J^-1
  Mat2 Cx;     // J^-T (C - M J^-1 Jdot) J^-1
  Vec2 Gx;     // J^-T G
  Vec2 Fx;     // J^-T F
  Mat2 Xi;     // Mx^-1
  Vec2 Gamma;  // Mx^-1 (-Cx xdot - Gx)
  Mat2 J;
  double detJ = 0.0;
};

inline constexpr double kDefaultSingularityThreshold = 1e-6;

inline Mat2 mass_matrix(const RobotParams& p, const JointState& st) {
  const double c2 = std::cos(st.q[1]);
  const double a = p.m2 * p.l2 * p.l2;
  const double b = p.m2 * p.l1 * p.l2 * c2;
  Mat2 m;
  m << a + 2.0 * b + (p.m1 + p.m2) * p.l1 * p.l1, a + b,
       a + b, a;
  return m;
}

// C12 carries the qd2 factor so that C*qd reproduces the velocity terms of the
// explicit two-link torque equations.
inline Mat2 coriolis_matrix(const RobotParams& p, const JointState& st) {
  const double h = p.m2 * p.l1 * p.l2 * std::sin(st.q[1]);
  Mat2 c;
  c << -2.0 * h * st.qd[1], -h * st.qd[1],
       h * st.qd[0], 0.0;
  return c;
}

inline Vec2 gravity_vector(const RobotParams& p, const JointState& st) {
  const double c1 = std::cos(st.q[0]);
  const double c12 = std::cos(st.q[0] + st.q[1]);
  const double g2 = p.m2 * p.l2 * p.g * c12;
  return {g2 + (p.m1 + p.m2) * p.l1 * p.g * c1, g2};
}

/// Bounded joint disturbance [2 c1 s2 + 5 c1^2, -(2 c1 s2 + 5 c1^2)].
inline Vec2 disturbance_vector(const JointState& st) {
  const double c1 = std::cos(st.q[0]);
  const double f = 2.0 * c1 * std::sin(st.q[1]) + 5.0 * c1 * c1;
  return {f, -f};
}

inline Mat2 jacobian(const RobotParams& p, const JointState& st) {
  const double s1 = std::sin(st.q[0]);
  const double c1 = std::cos(st.q[0]);
  const double s12 = std::sin(st.q[0] + st.q[1]);
  const double c12 = std::cos(st.q[0] + st.q[1]);
  Mat2 j;
  j << -p.l1 * s1 - p.l2 * s12, -p.l2 * s12,
        p.l1 * c1 + p.l2 * c12,  p.l2 * c12;
  return j;
}

inline Vec2 forward_kinematics(const RobotParams& p, const JointState& st) {
  const double q12 = st.q[0] + st.q[1];
  return {p.l1 * std::cos(st.q[0]) + p.l2 * std::cos(q12),
          p.l1 * std::sin(st.q[0]) + p.l2 * std::sin(q12)};
}

inline Mat2 jacobian_time_derivative(const RobotParams& p, const JointState& st) {
  const double s1 = std::sin(st.q[0]);
  const double c1 = std::cos(st.q[0]);
  const double s12 = std::sin(st.q[0] + st.q[1]);
  const double c12 = std::cos(st.q[0] + st.q[1]);
  const double w1 = st.qd[0];
  const double w12 = st.qd[0] + st.qd[1];
  Mat2 jd;
  jd << -p.l1 * c1 * w1 - p.l2 * c12 * w12, -p.l2 * c12 * w12,
        -p.l1 * s1 * w1 - p.l2 * s12 * w12, -p.l2 * s12 * w12;
  return jd;
}

/// qdd = M^-1 (tau_c + tau_e - C qd - G - F) with an explicit joint disturbance.
inline Vec2 forward_dynamics(const RobotParams& p, const JointState& st, const Vec2& tau_c,
                             const Vec2& tau_e, const Vec2& disturbance) {
  if (!all_finite(tau_c) || !all_finite(tau_e))
    throw std::invalid_argument("forward_dynamics: non-finite torque");
  const Vec2 rhs = tau_c + tau_e - coriolis_matrix(p, st) * st.qd - gravity_vector(p, st) - disturbance;
  return inverse2(mass_matrix(p, st)) * rhs;
}

inline Vec2 forward_dynamics(const RobotParams& p, const JointState& st, const Vec2& tau_c,
                             const Vec2& tau_e) {
  return forward_dynamics(p, st, tau_c, tau_e, disturbance_vector(st));
}

/// Task-space model for a given joint disturbance vector. Throws SingularityError
/// when |det J| does not exceed `min_abs_det`.
inline CartesianModel cartesian_model(const RobotParams& p, const JointState& st,
                                      const Vec2& disturbance,
                                      double min_abs_det = kDefaultSingularityThreshold) {
  CartesianModel out;
  out.J = jacobian(p, st);
  out.detJ = det2(out.J);
  if (!(std::abs(out.detJ) > min_abs_det)) throw SingularityError(out.detJ);

  const Mat2 Jinv = inverse2(out.J);
  const Mat2 JinvT = Jinv.transpose();
  const Mat2 M = mass_matrix(p, st);
  const Mat2 C = coriolis_matrix(p, st);
  const Mat2 Jd = jacobian_time_derivative(p, st);

  out.Mx = JinvT * M * Jinv;
  out.Cx = JinvT * (C - M * Jinv * Jd) * Jinv;
  out.Gx = JinvT * gravity_vector(p, st);
  out.Fx = JinvT * disturbance;
  out.Xi = inverse2(out.Mx);
  const Vec2 xdot = out.J * st.qd;
  out.Gamma = out.Xi * (-out.Cx * xdot - out.Gx);
  return out;
}

inline CartesianModel cartesian_model(const RobotParams& p, const JointState& st,
                                      double min_abs_det = kDefaultSingularityThreshold) {
  return cartesian_model(p, st, disturbance_vector(st), min_abs_det);
}

/// tau_c = J^T f_c.
inline Vec2 cartesian_to_joint_torque(const Vec2& force, const Mat2& J) {
  return J.transpose() * force;
}

/// Lumped task-space uncertainty Mx^-1 (-Fx + fe).
inline Vec2 lumped_uncertainty(const CartesianModel& m, const Vec2& fe) {
  return m.Xi * (-m.Fx + fe);
}

}  // namespace ftismc
