#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace execlab {

/// Raised when a model, grid or strategy violates its contract.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One right-continuous piece of the coefficient functions, active on
/// [t_from, next piece's t_from).
struct CoefficientPiece {
  double t_from = 0.0;
  double rho = 0.0;    // resilience, per unit time
  double mu = 0.0;     // impact drift, per unit time
  double sigma = 0.0;  // impact volatility, per sqrt(time)
};

/// Coefficient values in force at a time instant or over a grid step.
struct Coefficients {
  double rho = 0.0;
  double mu = 0.0;
  double sigma = 0.0;

  /// 2 rho + mu - sigma^2, the quantity that must stay positive.
  [[nodiscard]] double margin() const { return 2.0 * rho + mu - sigma * sigma; }
};

/// Which of the standing conditions the model satisfies.
struct ConditionReport {
  bool positive = false;            // 2rho + mu - sigma^2 > 0 on every piece
  bool uniformly_positive = false;  // ... bounded below by epsilon > 0
  double epsilon = 0.0;             // attained lower bound of the margin
  bool bounded = false;             // rho, mu, sigma bounded
  double rho_bound = 0.0;           // sup |rho|
  double mu_bound = 0.0;            // sup |mu|
  double sigma2_bound = 0.0;        // sup sigma^2
};

/// Deterministic piecewise-constant market model on [0, T].
class CoefficientModel {
 public:
  /// Validates and builds a model. Throws ModelError when T <= 0, gamma0 <= 0,
  /// the pieces do not start at 0, are not strictly increasing inside [0, T),
  /// or when 2 rho + mu - sigma^2 <= 0 on some piece.
  static CoefficientModel build(std::vector<CoefficientPiece> pieces, double gamma0,
                                double horizon);

  /// Single-piece convenience.
  static CoefficientModel constant(double rho, double mu, double sigma, double gamma0,
                                   double horizon);

  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] double gamma0() const { return gamma0_; }
  [[nodiscard]] const std::vector<CoefficientPiece>& pieces() const { return pieces_; }
  [[nodiscard]] const ConditionReport& conditions() const { return conditions_; }

  /// Interior breakpoints: every piece start in (0, T).
  [[nodiscard]] std::vector<double> breakpoints() const;

  /// Right-continuous value at t.
  [[nodiscard]] Coefficients at(double t) const;
  /// Value on the open interval (a, b); the interval must not straddle a
  /// breakpoint for the answer to be meaningful.
  [[nodiscard]] Coefficients on_interval(double a, double b) const;

  [[nodiscard]] double integrate_rho(double a, double b) const;
  [[nodiscard]] double integrate_mu(double a, double b) const;
  [[nodiscard]] double integrate_sigma2(double a, double b) const;

  [[nodiscard]] bool sigma_vanishes() const;
  [[nodiscard]] bool rho_vanishes() const;
  [[nodiscard]] bool is_constant() const { return pieces_.size() == 1; }

  /// Stable 16-hex-digit fingerprint of (T, gamma0, pieces).
  [[nodiscard]] std::string hash() const;

 private:
  CoefficientModel() = default;
  [[nodiscard]] std::size_t piece_index(double t) const;
  template <typename Value>
  [[nodiscard]] double integrate(double a, double b, Value value) const;

  double horizon_ = 0.0;
  double gamma0_ = 0.0;
  std::vector<CoefficientPiece> pieces_;
  ConditionReport conditions_;
};

/// Free-function form of CoefficientModel::build.
CoefficientModel build_model(std::vector<CoefficientPiece> pieces, double gamma0,
                             double horizon);

/// Uniform grid t0 + k h, k = 0..n_steps.
class TimeGrid {
 public:
  /// Empty placeholder grid; holds no points until assigned.
  TimeGrid() = default;
  TimeGrid(double t0, double t_end, std::size_t n_steps);

  /// Grid on [0, T] with the given number of steps.
  static TimeGrid uniform(double horizon, std::size_t n_steps) {
    return {0.0, horizon, n_steps};
  }
  /// Grid on [0, T] with step h; T / h must be an integer to 1e-9.
  static TimeGrid with_step(double horizon, double h);

  [[nodiscard]] double t0() const { return t0_; }
  [[nodiscard]] double t_end() const { return t_end_; }
  [[nodiscard]] std::size_t n_steps() const { return n_steps_; }
  [[nodiscard]] std::size_t size() const { return n_steps_ + 1; }
  [[nodiscard]] double step() const { return h_; }
  /// Grid time k; the last point is t_end exactly.
  [[nodiscard]] double time(std::size_t k) const {
    return k == n_steps_ ? t_end_ : t0_ + static_cast<double>(k) * h_;
  }
  /// Index of grid time t, or throws ModelError if t is not on the grid.
  [[nodiscard]] std::size_t index_of(double t) const;
  [[nodiscard]] bool contains_point(double t) const;
  /// Sub-grid starting at point k.
  [[nodiscard]] TimeGrid tail(std::size_t k) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.t0_ == b.t0_ && a.t_end_ == b.t_end_ && a.n_steps_ == b.n_steps_;
  }

 private:
  double t0_ = 0.0;
  double t_end_ = 0.0;
  std::size_t n_steps_ = 0;
  double h_ = 0.0;
};

/// Throws ModelError unless the grid ends at T and every breakpoint inside the
/// grid span is a grid point.
void require_aligned(const TimeGrid& grid, const CoefficientModel& model);

/// Coefficients in force on grid step k, i.e. on (t_k, t_{k+1}).
std::vector<Coefficients> step_coefficients(const CoefficientModel& model,
                                            const TimeGrid& grid);

/// One realisation of the Brownian driver and the impact process on a grid.
struct MarketPath {
  TimeGrid grid;
  std::vector<double> dw;     // Brownian increments, one per step
  std::vector<double> w;      // W at grid points, w[0] = 0
  std::vector<double> gamma;  // impact at grid points
  std::vector<double> alpha;  // 1 / gamma
  std::uint64_t path_id = 0;
  std::uint64_t seed = 0;     // engine seed derived from (master seed, path_id)

  /// Restriction to the sub-grid starting at point k. W is re-based so the
  /// tail starts at zero.
  [[nodiscard]] MarketPath tail(std::size_t k) const;
};

/// Counter-based per-path seed: a pure function of (master_seed, path_id).
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_id);

/// Simulates path `path_id`. gamma is stepped with the exact lognormal factor
/// exp((mu - sigma^2/2) h + sigma dW); gamma at grid.t0() is gamma0.
MarketPath simulate_path(const CoefficientModel& model, const TimeGrid& grid,
                         std::uint64_t master_seed, std::uint64_t path_id);

/// n_paths independent paths, identical regardless of thread count.
std::vector<MarketPath> simulate_market(const CoefficientModel& model, const TimeGrid& grid,
                                        std::size_t n_paths, std::uint64_t master_seed);

/// E(Q)_{t0, t_k} = exp(sum dQ - 1/2 sum d[Q]) accumulated over the steps.
/// Returns one value per grid point (steps + 1), starting at exactly 1.
std::vector<double> stochastic_exponential(std::span<const double> q_increments,
                                           std::span<const double> q_quadratic);

}  // namespace execlab
