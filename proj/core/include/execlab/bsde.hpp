#pragma once

#include "execlab/coefficients.hpp"
#include "execlab/lambert_w.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace execlab {

enum class SolutionSource { OW, LambertW, PiecewiseJump, NegativeResilience, OdeIntegrated, Constant };

std::string_view to_string(SolutionSource source);

/// Solution (Y, Z) of the value BSDE on a grid, with the feedback ratio
/// beta_tilde. All implemented regimes have deterministic coefficients, so
/// Z = 0 and the orthogonal martingale part vanishes.
struct ValueSolution {
  TimeGrid grid;
  std::vector<double> y;
  std::vector<double> z;
  std::vector<double> beta_tilde;  // right-continuous value at grid point k
  std::vector<double> beta_left;   // left limit at grid point k (coefficients of step k-1)
  SolutionSource source = SolutionSource::OdeIntegrated;
  /// Y at an arbitrary time in [t0, T]: exact for closed forms, cubic
  /// Hermite between grid points for the integrator.
  std::function<double(double)> y_at;
};

/// Discrete-time value factor Y^h on a grid with step h.
struct DiscreteValue {
  TimeGrid grid;
  double h = 0.0;
  std::vector<double> y_h;
};

/// sigma^2 y + (2 rho + mu - sigma^2) / 2, written as sigma^2 (y - 1/2) + rho + mu/2.
double driver_denominator(const Coefficients& c, double y);

/// f(y, z) = -((rho+mu) y + sigma z)^2 / den + mu y + sigma z.
double driver(const Coefficients& c, double y, double z);
double driver(const CoefficientModel& model, double t, double y, double z);

/// beta_tilde = ((rho+mu) y + sigma z) / den.
double beta_tilde_at(const Coefficients& c, double y, double z);
double beta_tilde_at(const CoefficientModel& model, double t, double y, double z);

/// Constant resilience, mu = sigma = 0: Y_s = 1 / (2 + (T - s) rho).
ValueSolution solve_y_ow(double rho, double horizon, const TimeGrid& grid);

/// Constant rho, sigma > 0, mu = 0 with 2 rho - sigma^2 > 0:
/// Y_s = c / W0(c exp(kappa - rho^2 s / sigma^2)),
/// c = (rho - sigma^2/2) / sigma^2, kappa = log 2 + (2 rho - sigma^2 + rho^2 T) / sigma^2.
ValueSolution solve_y_lambert(double rho, double sigma, double horizon, const TimeGrid& grid);

/// sigma = 0 with piecewise-constant rho and mu: the Bernoulli closed form
///   Y_s = e^{int_s^T mu} ( int_s^T g_r e^{int_r^T mu} dr + 2 )^{-1},
///   g = 2 (rho + mu)^2 / (2 rho + mu),
/// with the inner integral evaluated exactly piece by piece.
ValueSolution solve_y_deterministic(const CoefficientModel& model, const TimeGrid& grid);

/// Classical RK4, backward from Y(T) = 1/2, for dY/ds = -f(s, Y, 0). Each step
/// sees the coefficients of its piece, so breakpoints (grid points) restart
/// the integration. Throws ModelError if the denominator drops below eps/4.
ValueSolution solve_y_ode(const CoefficientModel& model, const TimeGrid& grid);

/// max over interior grid points of |central difference of Y - (-f(t, Y, 0))|.
/// Points where the coefficients jump are skipped.
double ode_residual(const ValueSolution& solution, const CoefficientModel& model);

/// One backward step of the discrete recursion from Y_{t+h} = y_next with
/// exact lognormal moments of Gamma = gamma_{t+h} / gamma_t.
double discrete_value_step(double y_next, const Coefficients& c, double h);

/// Y^h on the grid with step h: Y^h_T = 1/2 and the backward recursion.
DiscreteValue discrete_value_recursion(const CoefficientModel& model, double h);

}  // namespace execlab
