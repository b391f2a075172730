#pragma once

// Fixed-time math primitives shared by the controllers and the bound calculators.
//
// All vector maps act elementwise on length-2 task-space vectors. sign(0) is 0.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ftismc/types.hpp"

namespace ftismc {

inline double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline Vec2 sign(const Vec2& x) noexcept { return {sign(x[0]), sign(x[1])}; }

/// sign(x) * |x|^a, the odd-symmetric power written [x]^a.
inline double signed_power(double x, double a) {
  if (!std::isfinite(x)) throw std::invalid_argument("signed_power: non-finite input");
  if (!(a > 0.0)) throw std::invalid_argument("signed_power: exponent must be positive");
  return sign(x) * std::pow(std::abs(x), a);
}

inline Vec2 signed_power(const Vec2& x, double a) {
  return {signed_power(x[0], a), signed_power(x[1], a)};
}

/// |x|^a elementwise, with |x| floored at `floor`. Used for the derivative
/// terms n|e|^(n-1) and the (possibly negative-exponent) |e|^(alpha-1).
inline Vec2 abs_power(const Vec2& x, double a, double floor = 0.0) {
  return {std::pow(std::max(std::abs(x[0]), floor), a),
          std::pow(std::max(std::abs(x[1]), floor), a)};
}

/// Boundary-layer replacement for sign(): clamp(x / width, -1, 1).
inline double saturated_sign(double x, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("saturated_sign: width must be positive");
  return std::clamp(x / width, -1.0, 1.0);
}

inline Vec2 saturated_sign(const Vec2& x, double width) {
  return {saturated_sign(x[0], width), saturated_sign(x[1], width)};
}

/// Gains of ydot = -lambda1 [y]^alpha - lambda2 [y]^beta.
class FixedTimeGains {
 public:
  FixedTimeGains(double lambda1, double lambda2, double alpha, double beta)
      : lambda1_(lambda1), lambda2_(lambda2), alpha_(alpha), beta_(beta) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
      throw std::invalid_argument("FixedTimeGains: lambda1 and lambda2 must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("FixedTimeGains: alpha must lie in (0, 1), got " +
                                  std::to_string(alpha));
    if (!(beta > 1.0))
      throw std::invalid_argument("FixedTimeGains: beta must exceed 1, got " +
                                  std::to_string(beta));
  }

  double lambda1() const noexcept { return lambda1_; }
  double lambda2() const noexcept { return lambda2_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  /// Right-hand side of the stable scalar system.
  double rate(double y) const {
    return -lambda1_ * signed_power(y, alpha_) - lambda2_ * signed_power(y, beta_);
  }

 private:
  double lambda1_;
  double lambda2_;
  double alpha_;
  double beta_;
};

/// Upper bound on the settling time of ydot = -l1[y]^a - l2[y]^b, for any y(0):
/// 1/(l1(1-a)) + 1/(l2(b-1)).
inline double fixed_time_bound(const FixedTimeGains& g) noexcept {
  return 1.0 / (g.lambda1() * (1.0 - g.alpha())) + 1.0 / (g.lambda2() * (g.beta() - 1.0));
}

}  // namespace ftismc
