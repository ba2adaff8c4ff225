#pragma once

#include "execlab/bsde.hpp"
#include "execlab/coefficients.hpp"
#include "execlab/deviation.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace execlab {

/// Monte Carlo estimate of an expected cost.
struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double h = 0.0;
  std::uint64_t seed = 0;
  std::string model_hash;

  [[nodiscard]] nlohmann::json to_json() const;
  static CostEstimate from_json(const nlohmann::json& j);
};

/// V = (y/gamma)(d - gamma x)^2 - d^2 / (2 gamma).
struct ValueQuote {
  double v = 0.0;
  double y_t = 0.0;
  double gamma_t = 0.0;
  double x = 0.0;
  double d = 0.0;
};

/// sum_k (D_{k-} + gamma_k/2 xi_k) xi_k over all grid trades, initial and
/// terminal blocks included.
double pathwise_cost(const Strategy& strategy, const DeviationPath& deviation,
                     const MarketPath& market);

/// sum_k D_{k-} xi_k + sum_k gamma_k/2 (block_k)^2: the quadratic charge is
/// only levied on block trades. Equal to pathwise_cost for pure-jump grid
/// strategies.
double pathwise_cost_naive(const Strategy& strategy, const DeviationPath& deviation,
                           const MarketPath& market);

enum class DeviationScheme { Corrected, Naive };

struct CostOptions {
  double d_pre = 0.0;
  bool naive_cost = false;  // charge the quadratic term on block trades only
  DeviationScheme scheme = DeviationScheme::Corrected;
};

/// Sample mean and standard error (unbiased variance) of a per-path
/// functional over independent paths 0..n_paths-1. Reduction is pairwise in
/// path order, so the result does not depend on the thread count.
CostEstimate estimate_paths(const CoefficientModel& model, const TimeGrid& grid,
                            std::size_t n_paths, std::uint64_t seed,
                            const std::function<double(const MarketPath&)>& functional);

/// Several functionals evaluated on the same paths; one estimate per output.
std::vector<CostEstimate> estimate_paths_multi(
    const CoefficientModel& model, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
    std::size_t n_outputs, const std::function<void(const MarketPath&, std::span<double>)>& functional);

CostEstimate estimate_cost(const CoefficientModel& model, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed,
                           const StrategyFactory& strategy_factory,
                           const CostOptions& options = {});

ValueQuote value_function(double y_t, double gamma_t, double x, double d);

/// Path-independent part of the quadratic representation on a solution grid:
/// per step, 5 Gauss-Legendre nodes with their offsets, weights, beta_tilde
/// and driver denominator.
struct RepresentationKernel {
  TimeGrid grid;
  std::vector<double> y;  // Y at grid points
  std::vector<Coefficients> coeffs;
  std::vector<std::array<double, 5>> offset;
  std::vector<std::array<double, 5>> weight;
  std::vector<std::array<double, 5>> beta_tilde;
  std::vector<std::array<double, 5>> denominator;
};

/// Uses solution.y_at inside each step when available, the left grid value
/// otherwise.
RepresentationKernel representation_kernel(const CoefficientModel& model,
                                           const ValueSolution& solution);

/// Pathwise value of the quadratic representation of the cost:
///   (Y_t/gamma_t)(d - gamma_t x)^2 - d^2/(2 gamma_t)
///   + int (1/gamma)(bt (gamma X - D) + D)^2 (sigma^2 Y + (2 rho + mu - sigma^2)/2) ds.
/// Between grid points X is held, D decays at rate rho and gamma follows its
/// drift; the noise of gamma inside a step is ignored. The kernel grid must
/// contain the strategy grid as a tail.
double quadratic_representation_rhs(const RepresentationKernel& kernel, const MarketPath& market,
                                    const Strategy& strategy, const DeviationPath& deviation);

double quadratic_representation_rhs(const CoefficientModel& model, const ValueSolution& solution,
                                    const MarketPath& market, const Strategy& strategy,
                                    const DeviationPath& deviation);

/// (gamma nu^2 / rho)(e^{-rho T} - 1 + rho T / 2): naive expected cost of the
/// scaled Brownian strategy. Throws std::domain_error for rho = 0.
double closed_form_tildeJ(double gamma, double rho, double horizon, double nu);

/// (gamma0 x^2 / 2)(I1(nu) - I2(nu)): expected cost of the geometric Brownian
/// strategy under the deviation dynamics without covariation. Throws
/// std::domain_error at the removable singularities nu = 0, nu = -2 sigma and
/// nu^2 + 2 sigma nu + rho = 0, and when 2 rho - sigma^2 <= 0.
double closed_form_J_gbm(double gamma0, double x, double sigma, double rho, double horizon,
                         double nu);

}  // namespace execlab
