#include <execlab/deviation.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace execlab;

namespace {

MarketPath flat_market(double rho, double gamma, double horizon, std::size_t n) {
  const auto m = CoefficientModel::constant(rho, 0.0, 0.0, gamma, horizon);
  return simulate_path(m, TimeGrid::uniform(horizon, n), 0, 0);
}

}  // namespace

TEST(Strategy, TerminalPositionForcedToZero) {
  const TimeGrid g = TimeGrid::uniform(1.0, 4);
  const Strategy s(g, 2.0, {1.0, 1.0, 0.5, 0.5, 0.5});
  EXPECT_EQ(s.values().back(), 0.0);
  EXPECT_DOUBLE_EQ(s.trade(0), -1.0);
  EXPECT_DOUBLE_EQ(s.trade(4), -0.5);
  double total = 0.0;
  for (double t : s.trades()) total += t;
  EXPECT_DOUBLE_EQ(total, -2.0);
  const Strategy twice = s.scaled(2.0);
  EXPECT_DOUBLE_EQ(twice.trade(2), 2.0 * s.trade(2));
}

TEST(Deviation, DecaysBetweenTradesAndJumpsByImpact) {
  const double rho = 0.7;
  const auto model = CoefficientModel::constant(rho, 0.0, 0.0, 2.0, 1.0);
  const MarketPath m = simulate_path(model, TimeGrid::uniform(1.0, 4), 0, 0);
  const Strategy s(m.grid, 1.0, {0.5, 0.5, 0.5, 0.5, 0.0});
  const DeviationPath d = deviation_path(model, m, s, 0.3);
  EXPECT_DOUBLE_EQ(d.pre_trade[0], 0.3);
  EXPECT_DOUBLE_EQ(d.values[0], 0.3 + 2.0 * -0.5);
  for (std::size_t k = 1; k < 4; ++k)
    EXPECT_NEAR(d.pre_trade[k], d.values[k - 1] * std::exp(-rho * 0.25), 1e-15);
  EXPECT_NEAR(d.values[4], d.pre_trade[4] - 1.0, 1e-15);
}

TEST(Deviation, ImpactStateIsPositionMinusScaledDeviation) {
  const MarketPath m = flat_market(0.5, 1.5, 1.0, 5);
  const auto model = CoefficientModel::constant(0.5, 0.0, 0.0, 1.5, 1.0);
  const Strategy s(m.grid, 1.0, {0.8, 0.6, 0.4, 0.2, 0.1, 0.0});
  const DeviationPath d = deviation_path(model, m, s);
  const auto a = impact_state(s, d, m);
  for (std::size_t k = 0; k < a.size(); ++k)
    EXPECT_NEAR(a[k], s.values()[k] - d.values[k] / 1.5, 1e-15);
  EXPECT_EQ(d.impact_state, a);
}

TEST(Deviation, NaiveAndCorrectedAgreeWithoutNoise) {
  const auto model = CoefficientModel::constant(0.5, 0.2, 0.0, 1.0, 1.0);
  const MarketPath m = simulate_path(model, TimeGrid::uniform(1.0, 8), 0, 0);
  const Strategy s(m.grid, 1.0, {1.0, 0.9, 0.7, 0.6, 0.5, 0.3, 0.2, 0.1, 0.0});
  const DeviationPath a = deviation_path(model, m, s);
  const DeviationPath b = naive_deviation_path(model, m, s);
  for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-15);
}

TEST(Deviation, LinearInStrategyAndInitialDeviation) {
  const auto model = CoefficientModel::constant(0.5, 0.1, 0.4, 1.0, 1.0);
  const MarketPath m = simulate_path(model, TimeGrid::uniform(1.0, 6), 3, 1);
  const Strategy s(m.grid, 1.0, {0.9, 0.7, 0.5, 0.3, 0.2, 0.1, 0.0});
  const DeviationPath d1 = deviation_path(model, m, s, 0.2);
  const DeviationPath d3 = deviation_path(model, m, s.scaled(3.0), 0.6);
  for (std::size_t k = 0; k < d1.values.size(); ++k)
    EXPECT_NEAR(d3.values[k], 3.0 * d1.values[k], 1e-14);
}

TEST(Deviation, RejectsGridMismatch) {
  const auto model = CoefficientModel::constant(0.5, 0.0, 0.0, 1.0, 1.0);
  const MarketPath m = simulate_path(model, TimeGrid::uniform(1.0, 4), 0, 0);
  const Strategy s(TimeGrid::uniform(1.0, 5), 1.0, std::vector<double>(6, 0.0));
  EXPECT_THROW(deviation_path(model, m, s), ModelError);
}
