#pragma once

// Classical fixed-step fourth-order Runge-Kutta.

#include <utility>

namespace ftismc {

/// One RK4 step of ydot = f(t, y). State must support `State + double * State`.
template <class State, class Rhs>
State rk4_step(Rhs&& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace ftismc
