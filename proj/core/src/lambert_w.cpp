#include "execlab/lambert_w.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace execlab {

namespace {

constexpr int kMaxIterations = 50;
constexpr double kStepTolerance = 4.0 * std::numeric_limits<double>::epsilon();

double initial_guess(double z) {
  if (z < -0.25) {
    // Branch-point expansion in p = sqrt(2 (e z + 1)).
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * z + 1.0)));
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }
  if (z < std::numbers::e) return std::log1p(z);
  const double l = std::log(z);
  const double ll = std::log(l);
  return l - ll + ll / l;
}

}  // namespace

double lambert_w0(double z) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(z) || z < branch) throw std::domain_error("lambert_w0: argument below -1/e");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;
  if (z == branch) return -1.0;

  double w = initial_guess(z);
  for (int i = 0; i < kMaxIterations; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= kStepTolerance * std::abs(w)) break;
  }
  return w;
}

double lambert_w0_of_exp(double log_z) {
  if (std::isnan(log_z)) throw std::domain_error("lambert_w0_of_exp: NaN argument");
  if (log_z < 700.0) return lambert_w0(std::exp(log_z));
  // Newton on g(w) = w + log(w) - log_z, which is increasing and concave.
  double w = log_z - std::log(log_z);
  for (int i = 0; i < kMaxIterations; ++i) {
    const double g = w + std::log(w) - log_z;
    const double step = g / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= kStepTolerance * w) break;
  }
  return w;
}

}  // namespace execlab
