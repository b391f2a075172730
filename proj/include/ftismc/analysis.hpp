#pragma once

// Post-run metrics over logs and the closed-form settling-time bounds.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ftismc/controllers.hpp"
#include "ftismc/fxmath.hpp"
#include "ftismc/log.hpp"

namespace ftismc {

using Column = std::function<Vec2(const LogRow&)>;

inline Vec2 error_column(const LogRow& r) { return r.e; }

/// Per-axis root mean square of a column over rows with t >= t_from.
inline Vec2 rmse(const std::vector<LogRow>& log, const Column& column,
                 double t_from = -std::numeric_limits<double>::infinity()) {
  Vec2 acc = Vec2::Zero();
  std::size_t n = 0;
  for (const auto& r : log) {
    if (r.t < t_from) continue;
    const Vec2 v = column(r);
    acc += v.cwiseProduct(v);
    ++n;
  }
  if (n == 0) throw std::invalid_argument("rmse: empty log");
  return (acc / static_cast<double>(n)).cwiseSqrt();
}

inline Vec2 rmse(const std::vector<LogRow>& log,
                 double t_from = -std::numeric_limits<double>::infinity()) {
  return rmse(log, error_column, t_from);
}

/// First time after which |column|_inf stays below `threshold` to the end of
/// the log; nullopt if the final row is still outside.
inline std::optional<double> empirical_settling_time(const std::vector<LogRow>& log,
                                                     double threshold,
                                                     const Column& column = error_column) {
  if (!(threshold > 0.0)) throw std::invalid_argument("empirical_settling_time: threshold must be positive");
  if (log.empty()) return std::nullopt;
  for (std::size_t i = log.size(); i-- > 0;) {
    if (inf_norm(column(log[i])) >= threshold) {
      if (i + 1 == log.size()) return std::nullopt;
      return log[i + 1].t;
    }
  }
  return log.front().t;
}

struct LyapunovTraces {
  std::vector<double> t;
  std::vector<double> v_sigma;  // 1/2 sum sigma_i^2 (V1 or V2, per the active surface)
  std::vector<double> v3;       // 1/2 s1^T s1, s1 = e
  std::vector<double> v4;       // 1/2 s2^T s2, s2 = xdot - alpha_s
  std::vector<double> vn;       // v3 + v4
  std::vector<double> sigma_inf;
};

inline LyapunovTraces lyapunov_traces(const std::vector<LogRow>& log, const BspGains& bsp) {
  LyapunovTraces out;
  for (const auto& r : log) {
    const Reference ref{r.xr, r.xrdot, Vec2::Zero()};
    const Vec2 s2 = r.xdot - bsp_stabilizing(r.e, ref, bsp);
    out.t.push_back(r.t);
    out.v_sigma.push_back(0.5 * r.sigma.squaredNorm());
    out.v3.push_back(0.5 * r.e.squaredNorm());
    out.v4.push_back(0.5 * s2.squaredNorm());
    out.vn.push_back(out.v3.back() + out.v4.back());
    out.sigma_inf.push_back(inf_norm(r.sigma));
  }
  return out;
}

/// Largest step-to-step increase of `v` among samples whose gate value is at
/// least `band` (both endpoints). Non-positive means non-increasing there.
inline double max_increase_outside_band(const std::vector<double>& v,
                                        const std::vector<double>& gate, double band) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (gate[i - 1] < band || gate[i] < band) continue;
    worst = std::max(worst, v[i] - v[i - 1]);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Settling-time bounds

struct BoundReport {
  double t_s1 = 0.0;  // fixed-time surface s = 0 phase
  double t_r1 = 0.0;  // sigma1 reaching
  double t_s2 = 0.0;  // nonsingular surface s = 0 phase
  double t_r2 = 0.0;  // sigma2 reaching
  double t_n = 0.0;   // backstepping nominal
  double total_thm1 = 0.0;
  double total_thm2 = 0.0;  // excludes the non-constructive epsilon(tau) term
  std::optional<double> empirical;
};

/// Reaching bound from  Vdot <= -k3 2^((p+1)/2) V^((p+1)/2) - k4 2^((q+1)/2) N^((1-q)/2) V^((q+1)/2).
inline double reaching_bound(double k3, double k4, double p, double q, int n) {
  const double a = (p + 1.0) / 2.0;
  const double b = (q + 1.0) / 2.0;
  return 1.0 / (std::pow(2.0, a) * k3 * (1.0 - a)) +
         1.0 / (std::pow(2.0, b) * k4 * std::pow(static_cast<double>(n), (1.0 - q) / 2.0) * (b - 1.0));
}

/// Backstepping bound 2/(l2 2^((a+1)/2) (1-a)) + 2/(l3 2^((b+1)/2) (b-1)).
inline double backstepping_bound(const BspGains& g) {
  return 2.0 / (g.lambda2 * std::pow(2.0, (g.alpha + 1.0) / 2.0) * (1.0 - g.alpha)) +
         2.0 / (g.lambda3 * std::pow(2.0, (g.beta + 1.0) / 2.0) * (g.beta - 1.0));
}

inline BoundReport theoretical_bounds(const FtSurfaceGains& ft, const NsSurfaceGains& ns,
                                      const CompensatorGains& comp, const BspGains& bsp,
                                      int n = 2) {
  ft.validate();
  ns.validate();
  comp.validate();
  bsp.validate();
  if (n < 1) throw std::invalid_argument("theoretical_bounds: dimension must be >= 1");
  BoundReport r;
  r.t_s1 = fixed_time_bound(FixedTimeGains(ft.k1, ft.k2, ft.alpha, ft.beta));
  r.t_s2 = fixed_time_bound(FixedTimeGains(ns.k5, ns.k6, ns.m, ns.n));
  r.t_r1 = reaching_bound(comp.k3, comp.k4, comp.p_exp, comp.q_exp, n);
  r.t_r2 = r.t_r1;
  r.t_n = backstepping_bound(bsp);
  r.total_thm1 = r.t_s1 + r.t_r1 + r.t_n;
  r.total_thm2 = r.t_s2 + r.t_r2 + r.t_n;
  return r;
}

inline BoundReport theoretical_bounds(const ControllerConfig& c, int n = 2) {
  return theoretical_bounds(c.ft, c.ns, c.comp, c.bsp, n);
}

}  // namespace ftismc
