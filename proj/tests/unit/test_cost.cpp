#include <execlab/bsde.hpp>
#include <execlab/cost.hpp>
#include <execlab/strategy.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>

using namespace execlab;

TEST(Cost, ImmediateCloseEqualsTerminalValue) {
  for (double d : {0.0, 0.4, -1.3}) {
    const auto model = CoefficientModel::constant(0.5, 0.0, 0.0, 2.0, 1.0);
    const MarketPath m = simulate_path(model, TimeGrid::uniform(1.0, 4), 0, 0);
    const Strategy close = immediate_close(m.grid, 3.0);
    const double c = pathwise_cost(close, deviation_path(model, m, close, d), m);
    EXPECT_NEAR(c, 2.0 * 9.0 / 2.0 - d * 3.0, 1e-14);
    EXPECT_NEAR(c, value_function(0.5, 2.0, 3.0, d).v, 1e-14);
  }
}

TEST(Cost, TwoBlockStrategyByHand) {
  const double rho = 0.4;
  const double a = 0.3;
  const auto model = CoefficientModel::constant(rho, 0.0, 0.0, 1.0, 2.0);
  const MarketPath m = simulate_path(model, TimeGrid::uniform(2.0, 1), 0, 0);
  const Strategy s(m.grid, 1.0, {1.0 - a, 0.0});
  const double expected =
      0.5 * a * a + (-a * std::exp(-rho * 2.0) - 0.5 * (1.0 - a)) * -(1.0 - a);
  EXPECT_NEAR(pathwise_cost(s, deviation_path(model, m, s), m), expected, 1e-15);
}

TEST(Cost, QuadraticInStrategy) {
  const auto model = CoefficientModel::constant(0.5, 0.1, 0.6, 1.0, 1.0);
  const MarketPath m = simulate_path(model, TimeGrid::uniform(1.0, 10), 5, 2);
  std::vector<double> v(11);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::cos(static_cast<double>(k));
  const Strategy s(m.grid, 1.0, v);
  const double c1 = pathwise_cost(s, deviation_path(model, m, s), m);
  const Strategy s3 = s.scaled(-3.0);
  EXPECT_NEAR(pathwise_cost(s3, deviation_path(model, m, s3), m), 9.0 * c1, 1e-12);
}

TEST(Cost, NaiveEqualsFullForPureJumpStrategies) {
  const auto model = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 1.0);
  const MarketPath m = simulate_path(model, TimeGrid::uniform(1.0, 6), 1, 0);
  const Strategy s(m.grid, 1.0, {0.7, 0.6, 0.4, 0.4, 0.2, 0.1, 0.0});
  const DeviationPath d = deviation_path(model, m, s);
  EXPECT_NEAR(pathwise_cost(s, d, m), pathwise_cost_naive(s, d, m), 1e-15);
}

TEST(Cost, OptimalPlanAttainsValueInOwRegime) {
  const double rho = 0.5;
  const auto model = CoefficientModel::constant(rho, 0.0, 0.0, 1.0, 10.0);
  const TimeGrid g = TimeGrid::uniform(10.0, 2000);
  const auto plan = optimal_plan(model, solve_y_ow(rho, 10.0, g), simulate_path(model, g, 0, 0), 0,
                                 1.0, 0.0);
  const double c = pathwise_cost(plan.x_star, deviation_path(model, plan.market, plan.x_star), plan.market);
  EXPECT_NEAR(c, 1.0 / 7.0, 1e-6);
}

TEST(Cost, OptimalPlanBeatsAlternatives) {
  const double rho = 0.5;
  const auto model = CoefficientModel::constant(rho, 0.0, 0.0, 1.0, 10.0);
  const TimeGrid g = TimeGrid::uniform(10.0, 200);
  const MarketPath m = simulate_path(model, g, 0, 0);
  const auto plan = optimal_plan(model, solve_y_ow(rho, 10.0, g), m, 0, 1.0, 0.0);
  const double best = pathwise_cost(plan.x_star, deviation_path(model, m, plan.x_star), m);
  std::vector<double> lin(g.size());
  for (std::size_t k = 0; k < lin.size(); ++k) lin[k] = 1.0 - g.time(k) / 10.0;
  const Strategy linear(g, 1.0, lin);
  const Strategy close = immediate_close(g, 1.0);
  EXPECT_LT(best, pathwise_cost(linear, deviation_path(model, m, linear), m));
  EXPECT_LT(best, pathwise_cost(close, deviation_path(model, m, close), m));
}

TEST(Representation, ExactForDeterministicStrategies) {
  const double rho = 0.5;
  const auto model = CoefficientModel::constant(rho, 0.0, 0.0, 1.0, 10.0);
  const TimeGrid g = TimeGrid::uniform(10.0, 500);
  const auto sol = solve_y_ow(rho, 10.0, g);
  const MarketPath m = simulate_path(model, g, 0, 0);
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::exp(-0.3 * g.time(k)) * (k % 7 == 0 ? 0.5 : 1.0);
  for (double d : {0.0, 0.25}) {
    const Strategy s(g, 1.0, v);
    const DeviationPath dev = deviation_path(model, m, s, d);
    EXPECT_NEAR(pathwise_cost(s, dev, m), quadratic_representation_rhs(model, sol, m, s, dev), 1e-10);
  }
}

TEST(ClosedForms, BrownianNaiveCost) {
  const double rho = 0.2;
  const double horizon = 3.0;
  const double expected = 1.5 * 4.0 / rho * (std::exp(-rho * horizon) - 1.0 + rho * horizon / 2.0);
  EXPECT_NEAR(closed_form_tildeJ(1.5, rho, horizon, 2.0), expected, 1e-14);
  EXPECT_THROW(closed_form_tildeJ(1.0, 0.0, 1.0, 1.0), std::domain_error);
}

TEST(ClosedForms, BrownianNaiveCostMatchesSimulation) {
  const double rho = 0.05;
  const auto model = CoefficientModel::constant(rho, 0.0, 0.0, 1.0, 10.0);
  const TimeGrid g = TimeGrid::uniform(10.0, 1000);
  CostOptions opt;
  opt.naive_cost = true;
  opt.scheme = DeviationScheme::Naive;
  const CostEstimate est = estimate_cost(
      model, g, 5000, 17, [](const MarketPath& m) { return counterexample_brownian(2.0, m); }, opt);
  EXPECT_NEAR(est.mean, closed_form_tildeJ(1.0, rho, 10.0, 2.0), 4.0 * est.std_error);
  EXPECT_LT(est.mean, 0.0);
}

TEST(ClosedForms, GbmSingularities) {
  EXPECT_THROW(closed_form_J_gbm(1.0, 1.0, 0.8, 0.5, 10.0, 0.0), std::domain_error);
  EXPECT_THROW(closed_form_J_gbm(1.0, 1.0, 0.8, 0.5, 10.0, -1.6), std::domain_error);
  EXPECT_THROW(closed_form_J_gbm(1.0, 1.0, 0.8, 0.3, 10.0, -1.0), std::domain_error);
  const double j = closed_form_J_gbm(1.0, 1.0, 0.8, 0.5, 10.0, -1.0);
  EXPECT_TRUE(std::isfinite(j));
  EXPECT_NEAR(closed_form_J_gbm(2.0, 3.0, 0.8, 0.5, 10.0, -1.0), 18.0 * j, 1e-12 * std::abs(j) * 18.0);
}

TEST(CostEstimate, JsonRoundTrip) {
  CostEstimate e{1.25, 0.5, 100, 0.01, 9, "00ff00ff00ff00ff"};
  const auto j = e.to_json();
  for (const char* key : {"mean", "std_error", "n_paths", "h", "seed", "model_hash"})
    EXPECT_TRUE(j.contains(key)) << key;
  const CostEstimate back = CostEstimate::from_json(j);
  EXPECT_EQ(back.mean, e.mean);
  EXPECT_EQ(back.n_paths, e.n_paths);
  EXPECT_EQ(back.model_hash, e.model_hash);
}
