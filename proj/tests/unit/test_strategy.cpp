#include <execlab/bsde.hpp>
#include <execlab/cost.hpp>
#include <execlab/strategy.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace execlab;

namespace {

struct LambertCase {
  CoefficientModel model;
  ValueSolution solution;
};

LambertCase lambert(std::size_t steps) {
  auto model = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 2.0);
  return {model, solve_y_lambert(0.5, 0.8, 2.0, TimeGrid::uniform(2.0, steps))};
}

}  // namespace

TEST(Plan, TerminalPositionAndImpactStateConstancy) {
  const LambertCase s = lambert(200);
  for (std::uint64_t path = 0; path < 5; ++path) {
    for (double d : {0.0, 0.7}) {
      const auto plan =
          optimal_plan(s.model, s.solution, simulate_path(s.model, s.solution.grid, 4, path), 0, 10.0, d);
      EXPECT_EQ(plan.x_star.values().back(), 0.0);
      const double lambda = 10.0 - d / plan.gamma.front();
      for (std::size_t k = 0; k < plan.grid.size(); ++k)
        EXPECT_NEAR(plan.d_star.impact_state[k], lambda * plan.exp_q[k], 1e-12 * std::abs(lambda));
    }
  }
}

TEST(Plan, FeedbackLawHolds) {
  const LambertCase s = lambert(100);
  const auto plan =
      optimal_plan(s.model, s.solution, simulate_path(s.model, s.solution.grid, 2, 0), 0, 5.0, 0.0);
  for (std::size_t k = 0; k + 1 < plan.grid.size(); ++k) {
    const double gx = plan.gamma[k] * plan.x_star.values()[k];
    const double dv = plan.d_star.values[k];
    // D = -beta/(1-beta) gamma X at every grid point before T.
    EXPECT_NEAR(dv * (1.0 - plan.beta[k]), -plan.beta[k] * gx, 1e-12 * std::abs(gx) + 1e-14);
  }
}

TEST(Plan, ExponentialFactorMeanMatchesDrift) {
  const double rho = 0.5;
  const double s2 = 0.64;
  const LambertCase s = lambert(50);
  auto schedule = std::make_shared<const PlanSchedule>(plan_schedule(s.model, s.solution));
  const CostEstimate est = estimate_paths(s.model, s.solution.grid, 40000, 9, [&](const MarketPath& m) {
    return optimal_plan(schedule, m, 0, 1.0, 0.0).exp_q.back();
  });
  // beta deterministic: E[E(Q)_T] = exp(int beta (sigma^2 - rho) ds), Simpson on a fine grid.
  auto beta = [&](double t) {
    const double y = s.solution.y_at(t);
    return rho * y / (s2 * (y - 0.5) + rho);
  };
  const int n = 2000;
  const double h = 2.0 / n;
  double integral = beta(0.0) + beta(2.0);
  for (int i = 1; i < n; ++i) integral += (i % 2 == 1 ? 4.0 : 2.0) * beta(i * h);
  integral *= h / 3.0;
  EXPECT_NEAR(est.mean, std::exp(integral * (s2 - rho)), 4.0 * est.std_error);
}

TEST(Plan, DynamicallyConsistent) {
  const LambertCase s = lambert(400);
  const auto plan =
      optimal_plan(s.model, s.solution, simulate_path(s.model, s.solution.grid, 1, 3), 0, 10.0, 1.0);
  EXPECT_LE(dynamic_consistency_check(plan, 1.0), 1e-12);
  EXPECT_LE(dynamic_consistency_check(plan, 0.5), 1e-12);
}

TEST(Plan, LaterStartUsesTail) {
  const LambertCase s = lambert(100);
  const MarketPath m = simulate_path(s.model, s.solution.grid, 1, 0);
  const auto plan = optimal_plan(s.model, s.solution, m, 50, 3.0, 0.0);
  EXPECT_EQ(plan.grid.size(), 51U);
  EXPECT_EQ(plan.gamma.front(), m.gamma[50]);
  EXPECT_THROW(optimal_plan(s.model, s.solution, m, 100, 3.0, 0.0), ModelError);
}

TEST(Plan, OwDeviationConstantBetweenBlocks) {
  const auto model = CoefficientModel::constant(0.5, 0.0, 0.0, 1.0, 10.0);
  const TimeGrid g = TimeGrid::uniform(10.0, 100);
  const auto plan = optimal_plan(model, solve_y_ow(0.5, 10.0, g), simulate_path(model, g, 0, 0), 0, 1.0, 0.0);
  for (std::size_t k = 1; k < 100; ++k) EXPECT_NEAR(plan.d_star.values[k], plan.d_star.values[0], 1e-14);
  EXPECT_NEAR(plan.block_trades[0], -1.0 / 7.0, 1e-14);
  EXPECT_NEAR(plan.block_trades[100], -1.0 / 7.0, 1e-14);
  for (std::size_t k = 1; k < 100; ++k) EXPECT_NEAR(plan.block_trades[k], 0.0, 1e-14);
}

TEST(Plan, NoResilienceClosesImmediately) {
  const auto model = CoefficientModel::constant(0.0, 0.4, 0.0, 1.0, 3.0);
  const TimeGrid g = TimeGrid::uniform(3.0, 30);
  const auto plan = optimal_plan(model, solve_y_deterministic(model, g), simulate_path(model, g, 0, 0), 0, 2.0, 0.0);
  EXPECT_EQ(plan.x_star.values(), immediate_close(g, 2.0).values());
}

TEST(Counterexamples, BrownianAndGeometricShapes) {
  const auto model = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 1.0);
  const MarketPath m = simulate_path(model, TimeGrid::uniform(1.0, 10), 1, 0);
  const Strategy b = counterexample_brownian(2.0, m);
  EXPECT_EQ(b.x_pre(), 0.0);
  EXPECT_EQ(b.values()[0], 0.0);
  EXPECT_DOUBLE_EQ(b.values()[5], 2.0 * m.w[5]);
  EXPECT_EQ(b.block()[5], 0.0);
  EXPECT_DOUBLE_EQ(b.block()[10], -b.values()[9]);
  const Strategy gbm = counterexample_gbm(-1.0, 3.0, m);
  EXPECT_DOUBLE_EQ(gbm.values()[0], 3.0);
  EXPECT_DOUBLE_EQ(gbm.values()[4], 3.0 * std::exp(-m.w[4] - 0.5 * m.grid.time(4)));
  EXPECT_EQ(gbm.values()[10], 0.0);
}
