#pragma once

#include "execlab/bsde.hpp"
#include "execlab/coefficients.hpp"
#include "execlab/deviation.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace execlab {

/// Path-independent ingredients of the optimal plan on a grid:
/// per step k, the feedback ratio at the left endpoint and the exact step
/// integrals of the finite-variation parts of Q and [Q].
struct PlanSchedule {
  TimeGrid grid;
  std::vector<double> beta;        // beta at grid points (right-continuous)
  std::vector<double> beta_left;   // left limits at grid points
  std::vector<double> sigma_beta;  // beta_k sigma_k, multiplies dW on step k
  std::vector<double> drift;       // int beta (mu + rho - sigma^2) ds over step k
  std::vector<double> quadratic;   // int beta^2 sigma^2 ds over step k
};

/// The step integrals use 5-point Gauss-Legendre on each step with Y from
/// the solution's continuous evaluator.
PlanSchedule plan_schedule(const CoefficientModel& model, const ValueSolution& solution);

/// Optimal execution plan started at grid point `start` of the schedule.
/// Arrays are indexed on the plan grid (the tail grid from `start`).
struct OptimalPlan {
  TimeGrid grid;
  std::size_t start_index = 0;
  double x = 0.0;
  double d = 0.0;
  std::vector<double> q_increments;
  std::vector<double> q_quadratic;
  std::vector<double> exp_q;   // E(Q)_{t, t_k}
  std::vector<double> beta;    // beta at plan grid points
  std::vector<double> x_left;  // X*_{t_k -}
  std::vector<double> gamma;
  Strategy x_star;
  DeviationPath d_star;
  /// Jump of X* at each grid point; nonzero only at the start, where beta
  /// jumps, and at T.
  std::vector<double> block_trades;
  std::shared_ptr<const PlanSchedule> schedule;
  MarketPath market;  // tail of the market path the plan was built on
};

/// X*_s = (x - d/gamma_t) E(Q)_{t,s} (1 - beta_s), D*_s = (x - d/gamma_t) E(Q)_{t,s} (-gamma_s beta_s)
/// on [t, T), X*_T = 0 and D*_T = (x - d/gamma_t) E(Q)_{t,T} (-gamma_T).
OptimalPlan optimal_plan(std::shared_ptr<const PlanSchedule> schedule, const MarketPath& market,
                         std::size_t start, double x, double d);

OptimalPlan optimal_plan(const CoefficientModel& model, const ValueSolution& solution,
                         const MarketPath& market, std::size_t start, double x, double d);

/// X_{t-} = x, X_s = 0 on the grid.
Strategy immediate_close(const TimeGrid& grid, double x);

/// X_{0-} = X_0 = 0, X = nu W on (0, T), block trade to 0 at T.
Strategy counterexample_brownian(double nu, const MarketPath& market);

/// X_{0-} = X_0 = x, X = x exp(nu W - nu^2 s / 2) on (0, T), block trade to 0 at T.
/// Pair with naive_deviation_path.
Strategy counterexample_gbm(double nu, double x, const MarketPath& market);

struct JumpExample {
  double rho = 0.3;
  double t0 = 4.0;
};
struct NegativeResilienceExample {
  double rho = -0.1;
  double mu = 0.5;
};
using BetaExample = std::variant<JumpExample, NegativeResilienceExample>;

/// Coefficient model of an example (gamma0 = 1).
CoefficientModel example_model(const BetaExample& example, double horizon);

/// beta path of an example on the grid.
///  Jump:   beta = Y on [0, t0), Y (1 + 1/(2 rho + 1)) on [t0, T].
///  NegRes: beta = mu (rho + mu) ((rho + mu)^2 - rho^2 e^{mu (s - T)})^{-1}.
std::vector<double> example_beta_path(const BetaExample& example, double horizon,
                                      const TimeGrid& grid);

/// Rebuilds the plan from (u, X*_{u-}, D*_{u-}) and returns the largest
/// relative discrepancy against the original tail over X* and D* on [u, T].
/// u is a plan grid time.
double dynamic_consistency_check(const OptimalPlan& plan, double u);

}  // namespace execlab
