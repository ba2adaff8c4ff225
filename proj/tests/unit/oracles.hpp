#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

// w e^w = z by bisection on [-1, hi].
inline double lambert_w0(double z) {
  double lo = -1.0;
  double hi = std::max(1.0, std::log1p(z) + 1.0);
  while (hi * std::exp(hi) < z) hi *= 2.0;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) < z ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double ow_y(double rho, double horizon, double s) { return 1.0 / (2.0 + (horizon - s) * rho); }

// Backward RK4 for the autonomous-per-piece dY/ds = g(s, Y) from Y(T) = 1/2
// down to `target`; g sees the step midpoint so pieces switch at grid points.
inline double integrate_back(const std::function<double(double, double)>& g, double horizon,
                             double target, int steps) {
  const double h = horizon / steps;
  double y = 0.5;
  for (int i = steps; i > 0; --i) {
    const double s = i * h;
    if (s - h < target - 1e-12) break;
    const double mid = s - 0.5 * h;
    const double k1 = g(mid, y);
    const double k2 = g(mid, y - 0.5 * h * k1);
    const double k3 = g(mid, y - 0.5 * h * k2);
    const double k4 = g(mid, y - h * k3);
    y -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace oracle
