#pragma once

#include "ftismc/types.hpp"

namespace ftismc {

/// One logged instant of a closed-loop run. e = x - xr.
struct LogRow {
  double t = 0.0;
  Vec2 q, qd, x, xdot, xd, xr, xrdot, e, fc, tau_c, fe, s, sigma, u0, us;
  double det_j = 0.0;
  double psi_inf = 0.0;  // |Mx^-1 (-Fx + fe)|_inf
};

}  // namespace ftismc
