#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ftismc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Raised when a configuration-dependent inverse is requested too close to a
/// kinematic singularity.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(double det)
      : std::runtime_error(message(det)), det_(det) {}
  double det() const noexcept { return det_; }

 private:
  static std::string message(double det) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "Jacobian singular: det(J) = %.3e", det);
    return buf;
  }
  double det_;
};

/// Raised when an integrated quantity stops being finite.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form 2x2 inverse. Throws std::domain_error when |det| <= min_abs_det.
inline Mat2 inverse2(const Mat2& a, double min_abs_det = 0.0) {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (!(std::abs(det) > min_abs_det)) throw std::domain_error("inverse2: singular matrix");
  Mat2 inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return inv / det;
}

inline double det2(const Mat2& a) noexcept { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

inline bool all_finite(const Vec2& v) noexcept { return std::isfinite(v[0]) && std::isfinite(v[1]); }

inline double inf_norm(const Vec2& v) noexcept { return std::max(std::abs(v[0]), std::abs(v[1])); }

}  // namespace ftismc
