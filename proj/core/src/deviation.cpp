#include "execlab/deviation.hpp"

#include "execlab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace execlab {

namespace {

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (!(a == b)) throw ModelError("strategy and market path are defined on different grids");
}

std::vector<double> step_decay(const CoefficientModel& model, const TimeGrid& grid) {
  const auto coeffs = step_coefficients(model, grid);
  std::vector<double> out(grid.n_steps());
  double last_rho = 0.0;
  double last_decay = 1.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k == 0 || coeffs[k].rho != last_rho) {
      last_rho = coeffs[k].rho;
      last_decay = std::exp(-last_rho * grid.step());
    }
    out[k] = last_decay;
  }
  return out;
}

template <typename Impact>
DeviationPath run_scheme(const CoefficientModel& model, const MarketPath& market,
                         const Strategy& strategy, double d_pre, Impact impact) {
  require_same_grid(strategy.grid(), market.grid);
  const TimeGrid& grid = market.grid;
  const std::size_t n = grid.n_steps();
  const auto decay = step_decay(model, grid);

  DeviationPath out{grid, d_pre, std::vector<double>(n + 1), std::vector<double>(n + 1),
                    std::vector<double>(n + 1)};
  double pre = d_pre;
  for (std::size_t k = 0; k <= n; ++k) {
    out.pre_trade[k] = pre;
    out.values[k] = pre + impact(k) * strategy.trade(k);
    out.impact_state[k] = strategy.values()[k] - market.alpha[k] * out.values[k];
    if (k < n) pre = out.values[k] * decay[k];
  }
  return out;
}

DiagnosticEstimate mean_and_error(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  const double mean = pairwise_sum(samples) / n;
  if (samples.size() < 2) return {mean, 0.0};
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - mean) * (samples[i] - mean);
  return {mean, std::sqrt(pairwise_sum(sq) / (n - 1.0) / n)};
}

}  // namespace

Strategy::Strategy(TimeGrid grid, double x_pre, std::vector<double> values)
    : grid_(grid), x_pre_(x_pre), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ModelError("strategy needs one value per grid point");
  values_.back() = 0.0;
  block_ = trades();
}

Strategy::Strategy(TimeGrid grid, double x_pre, std::vector<double> values,
                   std::vector<double> block)
    : grid_(grid), x_pre_(x_pre), values_(std::move(values)), block_(std::move(block)) {
  if (values_.size() != grid_.size())
    throw ModelError("strategy needs one value per grid point");
  if (block_.size() != grid_.size())
    throw ModelError("strategy needs one block-trade entry per grid point");
  values_.back() = 0.0;
}

std::vector<double> Strategy::trades() const {
  std::vector<double> out(values_.size());
  for (std::size_t k = 0; k < values_.size(); ++k) out[k] = trade(k);
  return out;
}

Strategy Strategy::scaled(double factor) const {
  std::vector<double> v(values_);
  std::vector<double> b(block_);
  for (double& x : v) x *= factor;
  for (double& x : b) x *= factor;
  return {grid_, x_pre_ * factor, std::move(v), std::move(b)};
}

DeviationPath deviation_path(const CoefficientModel& model, const MarketPath& market,
                             const Strategy& strategy, double d_pre) {
  return run_scheme(model, market, strategy, d_pre,
                    [&](std::size_t k) { return market.gamma[k]; });
}

DeviationPath naive_deviation_path(const CoefficientModel& model, const MarketPath& market,
                                   const Strategy& strategy, double d_pre) {
  // A grid trade mixing a block and a continuous increment is split between
  // the two impact levels.
  return run_scheme(model, market, strategy, d_pre, [&](std::size_t k) {
    const double trade = strategy.trade(k);
    if (k == 0 || trade == 0.0) return market.gamma[k];
    const double block = strategy.block()[k];
    const double continuous = trade - block;
    return (block * market.gamma[k] + continuous * market.gamma[k - 1]) / trade;
  });
}

std::vector<double> impact_state(const Strategy& strategy, const DeviationPath& deviation,
                                 const MarketPath& market) {
  require_same_grid(strategy.grid(), market.grid);
  require_same_grid(deviation.grid, market.grid);
  std::vector<double> out(market.grid.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = strategy.values()[k] - market.alpha[k] * deviation.values[k];
  return out;
}

AdmissibilityReport admissibility_diagnostics(const CoefficientModel& model,
                                              std::span<const MarketPath> markets,
                                              const StrategyFactory& strategy_factory,
                                              double d_pre) {
  if (markets.empty()) throw ModelError("admissibility diagnostics need market paths");
  const std::size_t m = markets.size();
  std::vector<double> a1(m), a2(m), a3(m);
  parallel_for(m, [&](std::size_t i) {
    const MarketPath& market = markets[i];
    const Strategy strategy = strategy_factory(market);
    const DeviationPath dev = deviation_path(model, market, strategy, d_pre);
    const TimeGrid& grid = market.grid;
    const auto coeffs = step_coefficients(model, grid);
    const double h = grid.step();

    double sup = 0.0;
    double int2 = 0.0;
    double int3 = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double a = dev.impact_state[k];
      const double g = market.gamma[k];
      const double term = g * g * a * a * a * a;
      sup = std::max(sup, term);
      if (k < grid.n_steps()) {
        const double s2 = coeffs[k].sigma * coeffs[k].sigma;
        const double d = dev.values[k];
        const double al = market.alpha[k];
        int2 += term * s2 * h;
        int3 += d * d * d * d * al * al * s2 * h;
      }
    }
    a1[i] = sup;
    a2[i] = std::sqrt(int2);
    a3[i] = std::sqrt(int3);
  });
  return {mean_and_error(a1), mean_and_error(a2), mean_and_error(a3), m};
}

}  // namespace execlab
