#include <execlab/coefficients.hpp>
#include <execlab/cost.hpp>
#include <execlab/lambert_w.hpp>
#include <execlab/parallel.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>
#include <cstdlib>

using namespace execlab;

TEST(Model, RejectsInvalidInput) {
  EXPECT_THROW(CoefficientModel::constant(0.5, 0.0, 0.0, 1.0, 0.0), ModelError);
  EXPECT_THROW(CoefficientModel::constant(0.5, 0.0, 0.0, -1.0, 1.0), ModelError);
  EXPECT_THROW(CoefficientModel::constant(0.1, 0.0, 0.8, 1.0, 1.0), ModelError);
  EXPECT_THROW(CoefficientModel::build({{0.5, 0.5, 0.0, 0.0}}, 1.0, 1.0), ModelError);
  EXPECT_THROW(CoefficientModel::build({{0.0, 0.5, 0.0, 0.0}, {0.0, 0.4, 0.0, 0.0}}, 1.0, 1.0),
               ModelError);
}

TEST(Model, RightContinuousPieces) {
  const auto m = CoefficientModel::build({{0.0, 0.5, 0.0, 0.2}, {2.0, 0.3, 0.1, 0.0}}, 1.0, 4.0);
  EXPECT_DOUBLE_EQ(m.at(1.999).rho, 0.5);
  EXPECT_DOUBLE_EQ(m.at(2.0).rho, 0.3);
  EXPECT_DOUBLE_EQ(m.integrate_rho(1.0, 3.0), 0.5 + 0.3);
  EXPECT_DOUBLE_EQ(m.integrate_sigma2(0.0, 4.0), 0.04 * 2.0);
  ASSERT_EQ(m.breakpoints().size(), 1U);
  EXPECT_FALSE(m.sigma_vanishes());
  EXPECT_TRUE(m.conditions().uniformly_positive);
}

TEST(Model, HashIsStableAndSensitive) {
  const auto a = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 10.0);
  const auto b = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 10.0);
  const auto c = CoefficientModel::constant(0.5, 0.0, 0.8000001, 1.0, 10.0);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16U);
}

TEST(Grid, AlignmentAndTail) {
  const auto m = CoefficientModel::build({{0.0, 0.5, 0.0, 0.0}, {0.25, 0.3, 0.0, 0.0}}, 1.0, 1.0);
  EXPECT_NO_THROW(require_aligned(TimeGrid::uniform(1.0, 8), m));
  EXPECT_THROW(require_aligned(TimeGrid::uniform(1.0, 6), m), ModelError);
  const TimeGrid g = TimeGrid::uniform(1.0, 8);
  EXPECT_EQ(g.index_of(0.25), 2U);
  EXPECT_THROW((void)g.index_of(0.3), ModelError);
  EXPECT_EQ(g.tail(2).size(), 7U);
  EXPECT_EQ(g.time(8), 1.0);
}

TEST(LambertW, MatchesBisection) {
  for (double z : {-0.36, -0.2, 0.0, 1e-8, 0.5, 1.0, 2.718281828459045, 10.0, 1e3, 1e8}) {
    const double w = lambert_w0(z);
    EXPECT_NEAR(w, oracle::lambert_w0(z), 1e-13 * std::max(1.0, std::abs(w))) << z;
  }
  EXPECT_THROW(lambert_w0(-0.5), std::domain_error);
}

TEST(LambertW, OfExpBeyondOverflow) {
  EXPECT_NEAR(lambert_w0_of_exp(std::log(10.0)), oracle::lambert_w0(10.0), 1e-13);
  const double w = lambert_w0_of_exp(2000.0);
  EXPECT_NEAR(w + std::log(w), 2000.0, 1e-10);
}

TEST(Simulation, ReproducibleAndPathwiseIndependentOfOrder) {
  const auto m = CoefficientModel::constant(0.5, 0.1, 0.8, 2.0, 1.0);
  const TimeGrid g = TimeGrid::uniform(1.0, 50);
  const MarketPath a = simulate_path(m, g, 7, 3);
  const MarketPath b = simulate_path(m, g, 7, 3);
  EXPECT_EQ(a.gamma, b.gamma);
  EXPECT_EQ(a.dw, b.dw);
  const auto all = simulate_market(m, g, 5, 7);
  EXPECT_EQ(all[3].gamma, a.gamma);
  EXPECT_NE(simulate_path(m, g, 8, 3).dw, a.dw);
  EXPECT_EQ(a.gamma.front(), 2.0);
  for (std::size_t k = 0; k < a.gamma.size(); ++k) EXPECT_DOUBLE_EQ(a.alpha[k] * a.gamma[k], 1.0);
}

TEST(Simulation, TailRebasesBrownianMotion) {
  const auto m = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 1.0);
  const MarketPath p = simulate_path(m, TimeGrid::uniform(1.0, 10), 1, 0);
  const MarketPath t = p.tail(4);
  EXPECT_EQ(t.w.front(), 0.0);
  EXPECT_NEAR(t.w.back(), p.w.back() - p.w[4], 1e-15);
  EXPECT_EQ(t.gamma.front(), p.gamma[4]);
}

TEST(Simulation, ImpactMeanMatchesLognormalMoment) {
  const double mu = 0.3;
  const auto m = CoefficientModel::constant(0.5, mu, 0.6, 1.5, 2.0);
  const TimeGrid g = TimeGrid::uniform(2.0, 20);
  const CostEstimate est =
      estimate_paths(m, g, 40000, 11, [](const MarketPath& p) { return p.gamma.back(); });
  EXPECT_NEAR(est.mean, 1.5 * std::exp(mu * 2.0), 4.0 * est.std_error);
}

TEST(StochasticExponential, DeterministicIsExponential) {
  const std::vector<double> dq{0.1, -0.2, 0.05};
  const std::vector<double> qq{0.0, 0.0, 0.0};
  const auto e = stochastic_exponential(dq, qq);
  ASSERT_EQ(e.size(), 4U);
  EXPECT_EQ(e[0], 1.0);
  EXPECT_NEAR(e[3], std::exp(-0.05), 1e-15);
}

TEST(Parallel, ResultIndependentOfThreadCount) {
  const auto m = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 1.0);
  const TimeGrid g = TimeGrid::uniform(1.0, 20);
  auto f = [](const MarketPath& p) { return p.gamma.back() * p.w.back(); };
  setenv("EXEC_LAB_THREADS", "1", 1);
  const CostEstimate one = estimate_paths(m, g, 1000, 3, f);
  setenv("EXEC_LAB_THREADS", "7", 1);
  const CostEstimate seven = estimate_paths(m, g, 1000, 3, f);
  unsetenv("EXEC_LAB_THREADS");
  EXPECT_EQ(one.mean, seven.mean);
  EXPECT_EQ(one.std_error, seven.std_error);
}
