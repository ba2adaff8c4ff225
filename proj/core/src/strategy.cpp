#include "execlab/strategy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace execlab {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                          0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kWeights = {0.2369268850561891, 0.4786286704993665,
                                            0.5688888888888889, 0.4786286704993665,
                                            0.2369268850561891};

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

PlanSchedule plan_schedule(const CoefficientModel& model, const ValueSolution& solution) {
  if (!solution.y_at) throw ModelError("value solution has no continuous evaluator");
  const TimeGrid& grid = solution.grid;
  require_aligned(grid, model);
  const std::size_t n = grid.n_steps();
  const auto coeffs = step_coefficients(model, grid);

  PlanSchedule s{grid,
                 solution.beta_tilde,
                 solution.beta_left,
                 std::vector<double>(n),
                 std::vector<double>(n),
                 std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const Coefficients& c = coeffs[k];
    const double a = grid.time(k);
    const double b = grid.time(k + 1);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double beta_int = 0.0;
    double beta2_int = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) {
      const double beta = beta_tilde_at(c, solution.y_at(mid + half * kNodes[i]), 0.0);
      beta_int += kWeights[i] * beta * half;
      beta2_int += kWeights[i] * beta * beta * half;
    }
    s.sigma_beta[k] = solution.beta_tilde[k] * c.sigma;
    s.drift[k] = beta_int * (c.mu + c.rho - c.sigma * c.sigma);
    s.quadratic[k] = beta2_int * c.sigma * c.sigma;
  }
  return s;
}

OptimalPlan optimal_plan(std::shared_ptr<const PlanSchedule> schedule, const MarketPath& market,
                         std::size_t start, double x, double d) {
  const PlanSchedule& s = *schedule;
  if (!(market.grid == s.grid)) throw ModelError("market path and plan schedule grids differ");
  if (start >= s.grid.n_steps()) throw ModelError("plan start must precede T");

  OptimalPlan plan{s.grid.tail(start),
                   start,
                   x,
                   d,
                   {},
                   {},
                   {},
                   {},
                   {},
                   {},
                   Strategy(s.grid.tail(start), x, std::vector<double>(s.grid.size() - start)),
                   DeviationPath{},
                   {},
                   schedule,
                   market.tail(start)};
  const std::size_t n = plan.grid.n_steps();
  const MarketPath& m = plan.market;
  plan.gamma = m.gamma;

  plan.q_increments.resize(n);
  plan.q_quadratic.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = start + j;
    plan.q_increments[j] = -s.sigma_beta[k] * m.dw[j] - s.drift[k];
    plan.q_quadratic[j] = s.quadratic[k];
  }
  plan.exp_q = stochastic_exponential(plan.q_increments, plan.q_quadratic);

  const double lambda = x - d / m.gamma[0];
  std::vector<double> xs(n + 1), xl(n + 1), blocks(n + 1);
  DeviationPath dev{plan.grid, d, std::vector<double>(n + 1), std::vector<double>(n + 1),
                    std::vector<double>(n + 1)};
  plan.beta.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const std::size_t k = start + j;
    const double scale = lambda * plan.exp_q[j];
    const double beta = s.beta[k];
    plan.beta[j] = beta;
    if (j < n) {
      xs[j] = scale * (1.0 - beta);
      dev.values[j] = scale * (-m.gamma[j] * beta);
    } else {
      xs[j] = 0.0;
      dev.values[j] = scale * (-m.gamma[j]);
    }
    if (j == 0) {
      xl[j] = x;
      dev.pre_trade[j] = d;
    } else {
      xl[j] = scale * (1.0 - s.beta_left[k]);
      dev.pre_trade[j] = scale * (-m.gamma[j] * s.beta_left[k]);
    }
    blocks[j] = xs[j] - xl[j];
    dev.impact_state[j] = xs[j] - m.alpha[j] * dev.values[j];
  }
  // Between grid points X* moves continuously; only the jump parts are blocks.
  plan.x_star = Strategy(plan.grid, x, std::move(xs), blocks);
  plan.x_left = std::move(xl);
  plan.block_trades = std::move(blocks);
  plan.d_star = std::move(dev);
  return plan;
}

OptimalPlan optimal_plan(const CoefficientModel& model, const ValueSolution& solution,
                         const MarketPath& market, std::size_t start, double x, double d) {
  return optimal_plan(std::make_shared<const PlanSchedule>(plan_schedule(model, solution)), market,
                      start, x, d);
}

Strategy immediate_close(const TimeGrid& grid, double x) {
  return {grid, x, std::vector<double>(grid.size(), 0.0)};
}

Strategy counterexample_brownian(double nu, const MarketPath& market) {
  const std::size_t n = market.grid.n_steps();
  std::vector<double> values(n + 1, 0.0);
  std::vector<double> block(n + 1, 0.0);
  for (std::size_t k = 1; k < n; ++k) values[k] = nu * market.w[k];
  block[n] = -values[n - 1];
  return {market.grid, 0.0, std::move(values), std::move(block)};
}

Strategy counterexample_gbm(double nu, double x, const MarketPath& market) {
  const TimeGrid& grid = market.grid;
  const std::size_t n = grid.n_steps();
  std::vector<double> values(n + 1, 0.0);
  std::vector<double> block(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    values[k] = x * std::exp(nu * market.w[k] - 0.5 * nu * nu * (grid.time(k) - grid.t0()));
  block[n] = -values[n - 1];
  return {grid, x, std::move(values), std::move(block)};
}

CoefficientModel example_model(const BetaExample& example, double horizon) {
  return std::visit(
      [horizon](const auto& ex) -> CoefficientModel {
        using T = std::decay_t<decltype(ex)>;
        if constexpr (std::is_same_v<T, JumpExample>) {
          if (!(ex.t0 > 0.0 && ex.t0 < horizon)) throw ModelError("jump time must lie in (0, T)");
          return CoefficientModel::build(
              {{0.0, ex.rho, 0.0, 0.0}, {ex.t0, ex.rho, 1.0, 0.0}}, 1.0, horizon);
        } else {
          return CoefficientModel::constant(ex.rho, ex.mu, 0.0, 1.0, horizon);
        }
      },
      example);
}

std::vector<double> example_beta_path(const BetaExample& example, double horizon,
                                      const TimeGrid& grid) {
  return std::visit(
      [&](const auto& ex) -> std::vector<double> {
        using T = std::decay_t<decltype(ex)>;
        std::vector<double> beta(grid.size());
        if constexpr (std::is_same_v<T, JumpExample>) {
          const double r = ex.rho;
          auto y_late = [&](double s) {
            return (2.0 * r + 1.0) /
                   (2.0 * (r + 1.0) * (r + 1.0) - 2.0 * r * r * std::exp(s - horizon));
          };
          const double y_t0 = y_late(ex.t0);
          const double factor = 1.0 + 1.0 / (2.0 * r + 1.0);
          for (std::size_t k = 0; k < grid.size(); ++k) {
            const double s = grid.time(k);
            beta[k] = s < ex.t0 ? 1.0 / (1.0 / y_t0 + (ex.t0 - s) * r) : y_late(s) * factor;
          }
        } else {
          const double a = ex.rho + ex.mu;
          for (std::size_t k = 0; k < grid.size(); ++k)
            beta[k] = ex.mu * a /
                      (a * a - ex.rho * ex.rho * std::exp(ex.mu * (grid.time(k) - horizon)));
        }
        return beta;
      },
      example);
}

double dynamic_consistency_check(const OptimalPlan& plan, double u) {
  const std::size_t ju = plan.grid.index_of(u);
  if (ju == 0) return 0.0;
  if (ju >= plan.grid.n_steps()) throw ModelError("consistency time must precede T");
  const double x_u = plan.x_left[ju];
  const double d_u = plan.d_star.pre_trade[ju];
  // The plan keeps only the tail of the market; rebuild on that tail.
  auto tail_schedule = std::make_shared<PlanSchedule>(*plan.schedule);
  const std::size_t s0 = plan.start_index;
  tail_schedule->grid = plan.grid;
  for (auto* v : {&tail_schedule->beta, &tail_schedule->beta_left})
    v->erase(v->begin(), v->begin() + static_cast<std::ptrdiff_t>(s0));
  for (auto* v : {&tail_schedule->sigma_beta, &tail_schedule->drift, &tail_schedule->quadratic})
    v->erase(v->begin(), v->begin() + static_cast<std::ptrdiff_t>(s0));
  const OptimalPlan rebuilt = optimal_plan(tail_schedule, plan.market, ju, x_u, d_u);
  double worst = 0.0;
  for (std::size_t j = 0; j < rebuilt.grid.size(); ++j) {
    worst = std::max(worst, relative_gap(rebuilt.x_star.values()[j], plan.x_star.values()[ju + j]));
    worst = std::max(worst, relative_gap(rebuilt.d_star.values[j], plan.d_star.values[ju + j]));
  }
  return worst;
}

}  // namespace execlab
