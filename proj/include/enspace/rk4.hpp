#pragma once

#include <cmath>

#include "enspace/errors.hpp"

namespace enspace {

namespace detail {

inline bool all_finite(double v) { return std::isfinite(v); }

template <class V>
bool all_finite(const V& v) {
  return v.allFinite();
}

}  // namespace detail

/// One classical RK4 step with a precomputed first stage. Throws
/// DivergenceError naming the stage (1..4) whose derivative, or the final
/// state, is not finite.
template <class V, class F>
V rk4_step_from(const V& x, double t, double h, const V& k1, F&& rhs) {
  if (!detail::all_finite(k1)) throw DivergenceError(1, t);
  const V k2 = rhs(t + 0.5 * h, V(x + (0.5 * h) * k1));
  if (!detail::all_finite(k2)) throw DivergenceError(2, t);
  const V k3 = rhs(t + 0.5 * h, V(x + (0.5 * h) * k2));
  if (!detail::all_finite(k3)) throw DivergenceError(3, t);
  const V k4 = rhs(t + h, V(x + h * k3));
  if (!detail::all_finite(k4)) throw DivergenceError(4, t);
  V next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!detail::all_finite(next)) throw DivergenceError(4, t);
  return next;
}

/// One classical RK4 step of x' = rhs(t, x).
template <class V, class F>
V rk4_step(const V& x, double t, double h, F&& rhs) {
  const V k1 = rhs(t, x);
  return rk4_step_from(x, t, h, k1, rhs);
}

}  // namespace enspace
