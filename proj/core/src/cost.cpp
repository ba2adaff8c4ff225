#include "execlab/cost.hpp"

#include "execlab/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace execlab {

nlohmann::json CostEstimate::to_json() const {
  return {{"mean", mean},   {"std_error", std_error}, {"n_paths", n_paths},
          {"h", h},         {"seed", seed},           {"model_hash", model_hash}};
}

CostEstimate CostEstimate::from_json(const nlohmann::json& j) {
  CostEstimate e;
  e.mean = j.at("mean").get<double>();
  e.std_error = j.at("std_error").get<double>();
  e.n_paths = j.at("n_paths").get<std::size_t>();
  e.h = j.at("h").get<double>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.model_hash = j.at("model_hash").get<std::string>();
  return e;
}

double pathwise_cost(const Strategy& strategy, const DeviationPath& deviation,
                     const MarketPath& market) {
  double total = 0.0;
  for (std::size_t k = 0; k < market.grid.size(); ++k) {
    const double xi = strategy.trade(k);
    total += (deviation.pre_trade[k] + 0.5 * market.gamma[k] * xi) * xi;
  }
  return total;
}

double pathwise_cost_naive(const Strategy& strategy, const DeviationPath& deviation,
                           const MarketPath& market) {
  double total = 0.0;
  for (std::size_t k = 0; k < market.grid.size(); ++k) {
    const double xi = strategy.trade(k);
    const double block = strategy.block()[k];
    total += deviation.pre_trade[k] * xi + 0.5 * market.gamma[k] * block * block;
  }
  return total;
}

std::vector<CostEstimate> estimate_paths_multi(
    const CoefficientModel& model, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
    std::size_t n_outputs, const std::function<void(const MarketPath&, std::span<double>)>& functional) {
  if (n_paths < 2) throw ModelError("a Monte Carlo estimate needs at least two paths");
  require_aligned(grid, model);
  std::vector<double> samples(n_paths * n_outputs);
  parallel_for(n_paths, [&](std::size_t i) {
    functional(simulate_path(model, grid, seed, static_cast<std::uint64_t>(i)),
               std::span<double>(samples).subspan(i * n_outputs, n_outputs));
  });
  const double n = static_cast<double>(n_paths);
  std::vector<CostEstimate> out;
  std::vector<double> column(n_paths);
  for (std::size_t j = 0; j < n_outputs; ++j) {
    for (std::size_t i = 0; i < n_paths; ++i) column[i] = samples[i * n_outputs + j];
    const double mean = pairwise_sum(column) / n;
    for (double& s : column) s = (s - mean) * (s - mean);
    const double variance = pairwise_sum(column) / (n - 1.0);
    out.push_back({mean, std::sqrt(variance / n), n_paths, grid.step(), seed, model.hash()});
  }
  return out;
}

CostEstimate estimate_paths(const CoefficientModel& model, const TimeGrid& grid,
                            std::size_t n_paths, std::uint64_t seed,
                            const std::function<double(const MarketPath&)>& functional) {
  return estimate_paths_multi(model, grid, n_paths, seed, 1,
                              [&](const MarketPath& market, std::span<double> out) {
                                out[0] = functional(market);
                              })
      .front();
}

CostEstimate estimate_cost(const CoefficientModel& model, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed,
                           const StrategyFactory& strategy_factory, const CostOptions& options) {
  return estimate_paths(model, grid, n_paths, seed, [&](const MarketPath& market) {
    const Strategy strategy = strategy_factory(market);
    const DeviationPath dev = options.scheme == DeviationScheme::Corrected
                                  ? deviation_path(model, market, strategy, options.d_pre)
                                  : naive_deviation_path(model, market, strategy, options.d_pre);
    return options.naive_cost ? pathwise_cost_naive(strategy, dev, market)
                              : pathwise_cost(strategy, dev, market);
  });
}

ValueQuote value_function(double y_t, double gamma_t, double x, double d) {
  if (!(gamma_t > 0.0)) throw ModelError("value_function needs gamma_t > 0");
  const double gap = d - gamma_t * x;
  return {y_t / gamma_t * gap * gap - d * d / (2.0 * gamma_t), y_t, gamma_t, x, d};
}

RepresentationKernel representation_kernel(const CoefficientModel& model,
                                           const ValueSolution& solution) {
  constexpr std::array<double, 5> nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                           0.5384693101056831, 0.9061798459386640};
  constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665,
                                             0.5688888888888889, 0.4786286704993665,
                                             0.2369268850561891};
  const TimeGrid& grid = solution.grid;
  require_aligned(grid, model);
  const std::size_t n = grid.n_steps();
  RepresentationKernel kernel{grid, solution.y, step_coefficients(model, grid), {}, {}, {}, {}};
  kernel.offset.resize(n);
  kernel.weight.resize(n);
  kernel.beta_tilde.resize(n);
  kernel.denominator.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = grid.time(k);
    const double half = 0.5 * (grid.time(k + 1) - a);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double tau = half * (1.0 + nodes[i]);
      const double y = solution.y_at ? solution.y_at(a + tau) : solution.y[k];
      kernel.offset[k][i] = tau;
      kernel.weight[k][i] = half * weights[i];
      kernel.beta_tilde[k][i] = beta_tilde_at(kernel.coeffs[k], y, 0.0);
      kernel.denominator[k][i] = driver_denominator(kernel.coeffs[k], y);
    }
  }
  return kernel;
}

double quadratic_representation_rhs(const RepresentationKernel& kernel, const MarketPath& market,
                                    const Strategy& strategy, const DeviationPath& deviation) {
  const TimeGrid& grid = market.grid;
  if (!(strategy.grid() == grid) || !(deviation.grid == grid))
    throw ModelError("strategy, deviation and market must share a grid");
  if (!kernel.grid.contains_point(grid.t0()) ||
      kernel.grid.n_steps() - kernel.grid.index_of(grid.t0()) != grid.n_steps())
    throw ModelError("value solution grid does not cover the strategy grid");
  const std::size_t offset = kernel.grid.index_of(grid.t0());

  const double head =
      value_function(kernel.y[offset], market.gamma[0], strategy.x_pre(), deviation.d_pre).v;
  double integral = 0.0;
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const std::size_t j = offset + k;
    const Coefficients& c = kernel.coeffs[j];
    const double x = strategy.values()[k];
    double step = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      const double tau = kernel.offset[j][i];
      const double g = market.gamma[k] * std::exp(c.mu * tau);
      const double d = deviation.values[k] * std::exp(-c.rho * tau);
      const double gap = kernel.beta_tilde[j][i] * (g * x - d) + d;
      step += kernel.weight[j][i] * gap * gap / g * kernel.denominator[j][i];
    }
    integral += step;
  }
  return head + integral;
}

double quadratic_representation_rhs(const CoefficientModel& model, const ValueSolution& solution,
                                    const MarketPath& market, const Strategy& strategy,
                                    const DeviationPath& deviation) {
  return quadratic_representation_rhs(representation_kernel(model, solution), market, strategy,
                                      deviation);
}

double closed_form_tildeJ(double gamma, double rho, double horizon, double nu) {
  if (rho == 0.0) throw std::domain_error("closed_form_tildeJ: rho must be nonzero");
  return gamma * nu * nu / rho * (std::exp(-rho * horizon) - 1.0 + 0.5 * rho * horizon);
}

double closed_form_J_gbm(double gamma0, double x, double sigma, double rho, double horizon,
                         double nu) {
  if (!(2.0 * rho - sigma * sigma > 0.0))
    throw std::domain_error("closed_form_J_gbm: requires 2 rho - sigma^2 > 0");
  const double a = nu * nu + 2.0 * sigma * nu;  // exponent rate of E[gamma X^2]
  const double b = rho + a;
  constexpr double tiny = 1e-14;
  if (std::abs(nu) < tiny)
    throw std::domain_error("closed_form_J_gbm: nu = 0 is a removable singularity");
  if (std::abs(nu + 2.0 * sigma) < tiny)
    throw std::domain_error("closed_form_J_gbm: nu = -2 sigma is a removable singularity");
  if (std::abs(b) < tiny)
    throw std::domain_error("closed_form_J_gbm: nu^2 + 2 sigma nu + rho = 0 is singular");
  const double i1 = std::exp(a * horizon) * (nu * nu / a - 2.0 * nu * nu / b + 1.0);
  const double i2 = nu * nu / a - 2.0 * nu * nu * std::exp(-rho * horizon) / b;
  return 0.5 * gamma0 * x * x * (i1 - i2);
}

}  // namespace execlab
