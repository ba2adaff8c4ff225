#pragma once

#include "execlab/coefficients.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace execlab {

/// Grid-sampled execution strategy. values[k] is the position right after
/// the trade at grid point k; the trade at k is values[k] - values[k-1] with
/// values[-1] := x_pre. The last value is forced to 0.
///
/// `block` holds the part of each grid trade that is a block trade (a jump of
/// the continuous-time strategy). A plain grid strategy is pure-jump, so by
/// default block[k] equals the whole trade. Strategies with a continuous
/// martingale part (the counterexamples) mark their interior increments with
/// block[k] = 0; only the naive cost functional looks at this.
class Strategy {
 public:
  Strategy(TimeGrid grid, double x_pre, std::vector<double> values);
  Strategy(TimeGrid grid, double x_pre, std::vector<double> values,
           std::vector<double> block);

  [[nodiscard]] const TimeGrid& grid() const { return grid_; }
  [[nodiscard]] double x_pre() const { return x_pre_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] const std::vector<double>& block() const { return block_; }
  [[nodiscard]] double trade(std::size_t k) const {
    return values_[k] - (k == 0 ? x_pre_ : values_[k - 1]);
  }
  [[nodiscard]] std::vector<double> trades() const;

  /// The same strategy with position and trades multiplied by `factor`.
  [[nodiscard]] Strategy scaled(double factor) const;

 private:
  TimeGrid grid_;
  double x_pre_;
  std::vector<double> values_;
  std::vector<double> block_;
};

/// Deviation D along a strategy.
struct DeviationPath {
  TimeGrid grid;
  double d_pre = 0.0;
  std::vector<double> values;        // D right after the trade at grid point k
  std::vector<double> pre_trade;     // D right before the trade at grid point k
  std::vector<double> impact_state;  // A = X - alpha D
};

/// Discrete deviation scheme: pre_trade[0] = d_pre,
///   values[k]      = pre_trade[k] + gamma[k] * trade[k],
///   pre_trade[k+1] = values[k] * exp(-int_{t_k}^{t_{k+1}} rho).
/// Using gamma at the trade time (not at the previous grid point) is what
/// produces the covariation [gamma, X] in the continuous limit.
DeviationPath deviation_path(const CoefficientModel& model, const MarketPath& market,
                             const Strategy& strategy, double d_pre = 0.0);

/// Deviation under dD = -rho D ds + gamma dX without the covariation term:
/// continuous increments (block[k] == 0) are weighted with the impact at the
/// previous grid point, block trades with the impact at the trade time.
DeviationPath naive_deviation_path(const CoefficientModel& model, const MarketPath& market,
                                   const Strategy& strategy, double d_pre = 0.0);

/// A[k] = X[k] - alpha[k] D[k].
std::vector<double> impact_state(const Strategy& strategy, const DeviationPath& deviation,
                                 const MarketPath& market);

using StrategyFactory = std::function<Strategy(const MarketPath&)>;

struct DiagnosticEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimates at t = 0 of the three admissibility expectations:
///   A1: E[ sup_s gamma^2 (X - alpha D)^4 ]
///   A2: E[ ( int gamma^2 (X - alpha D)^4 sigma^2 ds )^(1/2) ]
///   A3: E[ ( int D^4 alpha^2 sigma^2 ds )^(1/2) ]
/// These are finite-sample estimates and certify nothing.
struct AdmissibilityReport {
  DiagnosticEstimate a1;
  DiagnosticEstimate a2;
  DiagnosticEstimate a3;
  std::size_t n_paths = 0;
  static constexpr bool diagnostic_only = true;
};

AdmissibilityReport admissibility_diagnostics(const CoefficientModel& model,
                                              std::span<const MarketPath> markets,
                                              const StrategyFactory& strategy_factory,
                                              double d_pre = 0.0);

}  // namespace execlab
