#pragma once

// Admittance shaping of the desired trajectory: a per-axis virtual
// mass-spring-damper driven by the human force turns x_d into the reference x_r.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ftismc/types.hpp"

namespace ftismc {

struct Reference {
  Vec2 xr = Vec2::Zero();
  Vec2 xrd = Vec2::Zero();
  Vec2 xrdd = Vec2::Zero();
};

struct AdmittanceParams {
  Vec2 km = Vec2::Constant(20.0);   // kg
  Vec2 kb = Vec2::Constant(20.0);   // N s/m
  Vec2 kk = Vec2::Constant(100.0);  // N/m

  void validate() const {
    if ((km.array() <= 0.0).any() || (kb.array() <= 0.0).any() || (kk.array() <= 0.0).any())
      throw std::invalid_argument("AdmittanceParams: km, kb, kk must be positive");
  }
};

/// Offset xi = x_r - x_d and its rate.
struct AdmittanceState {
  Vec2 xi = Vec2::Zero();
  Vec2 xid = Vec2::Zero();
};

struct ForceProfile {
  Vec2 amplitude = Vec2::Constant(1.0);  // N
  double t_on = 10.0;
  double t_full = 11.0;
  double t_rampdown = 20.0;
  double t_off = 21.0;

  void validate() const {
    if (!(t_on < t_full && t_full < t_rampdown && t_rampdown < t_off))
      throw std::invalid_argument("ForceProfile: breakpoints must be strictly increasing");
  }
};

/// Circle of radius 0.14 m traversed at 0.5 rad/s.
inline Reference desired_trajectory(double t) {
  constexpr double r = 0.14;
  constexpr double w = 0.5;
  const double c = std::cos(w * t);
  const double s = std::sin(w * t);
  Reference d;
  d.xr = {r * c, r * s};
  d.xrd = {-r * w * s, r * w * c};
  d.xrdd = {-r * w * w * c, -r * w * w * s};
  return d;
}

/// Raised-cosine on, plateau at 2a, raised-cosine off. The cosine branches use
/// cos(pi t) literally, which is continuous at the default breakpoints 10/11/20/21.
inline Vec2 human_force(double t, const ForceProfile& fp) {
  const double pi = std::numbers::pi;
  if (t < fp.t_on || t >= fp.t_off) return Vec2::Zero();
  if (t < fp.t_full) return fp.amplitude * (1.0 - std::cos(pi * t));
  if (t < fp.t_rampdown) return 2.0 * fp.amplitude;
  return fp.amplitude * (1.0 + std::cos(pi * t));
}

/// xi_dd = (fe - kb xi_d - kk xi) / km.
inline Vec2 admittance_accel(const AdmittanceState& s, const Vec2& fe, const AdmittanceParams& p) {
  return ((fe - p.kb.cwiseProduct(s.xid) - p.kk.cwiseProduct(s.xi)).array() / p.km.array()).matrix();
}

inline Reference reference(double t, const AdmittanceState& s, const Vec2& fe,
                           const AdmittanceParams& p) {
  Reference r = desired_trajectory(t);
  r.xr += s.xi;
  r.xrd += s.xid;
  r.xrdd += admittance_accel(s, fe, p);
  return r;
}

/// 1/2 km xid^2 + 1/2 kk xi^2 summed over axes.
inline double admittance_energy(const AdmittanceState& s, const AdmittanceParams& p) {
  return 0.5 * (p.km.cwiseProduct(s.xid.cwiseProduct(s.xid)).sum() +
                p.kk.cwiseProduct(s.xi.cwiseProduct(s.xi)).sum());
}

}  // namespace ftismc
