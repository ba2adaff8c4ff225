#include "execlab/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace execlab {

namespace {

constexpr double kOvershoot = 1e-12;

double clamp_value(double y) {
  if (y > 0.5 && y <= 0.5 + kOvershoot) return 0.5;
  if (y < 0.0 && y >= -kOvershoot) return 0.0;
  return y;
}

/// Fills beta_tilde, beta_left and z from y.
void attach_beta(ValueSolution& sol, const CoefficientModel& model) {
  const TimeGrid& grid = sol.grid;
  const std::size_t n = grid.n_steps();
  sol.z.assign(n + 1, 0.0);
  sol.beta_tilde.resize(n + 1);
  sol.beta_left.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = grid.time(k);
    sol.beta_tilde[k] = beta_tilde_at(model.at(t), sol.y[k], 0.0);
    const Coefficients left =
        k == 0 ? model.at(t) : model.on_interval(grid.time(k - 1), t);
    sol.beta_left[k] = beta_tilde_at(left, sol.y[k], 0.0);
  }
}

ValueSolution from_closed_form(const TimeGrid& grid, const CoefficientModel& model,
                               SolutionSource source, std::function<double(double)> y_at) {
  ValueSolution sol;
  sol.grid = grid;
  sol.source = source;
  sol.y.resize(grid.size());
  for (std::size_t k = 0; k < grid.n_steps(); ++k) sol.y[k] = clamp_value(y_at(grid.time(k)));
  sol.y.back() = 0.5;
  sol.y_at = std::move(y_at);
  attach_beta(sol, model);
  return sol;
}

void require_grid_in_horizon(const TimeGrid& grid, double horizon) {
  if (std::abs(grid.t_end() - horizon) > 1e-9 * horizon)
    throw ModelError("solution grid must end at the horizon T");
}

}  // namespace

std::string_view to_string(SolutionSource source) {
  switch (source) {
    case SolutionSource::OW: return "OW";
    case SolutionSource::LambertW: return "LambertW";
    case SolutionSource::PiecewiseJump: return "PiecewiseJump";
    case SolutionSource::NegativeResilience: return "NegativeResilience";
    case SolutionSource::OdeIntegrated: return "OdeIntegrated";
    case SolutionSource::Constant: return "Constant";
  }
  return "unknown";
}

double driver_denominator(const Coefficients& c, double y) {
  return c.sigma * c.sigma * (y - 0.5) + c.rho + 0.5 * c.mu;
}

double beta_tilde_at(const Coefficients& c, double y, double z) {
  const double den = driver_denominator(c, y);
  if (!(den > 0.0)) throw ModelError("degenerate driver denominator");
  return ((c.rho + c.mu) * y + c.sigma * z) / den;
}

double driver(const Coefficients& c, double y, double z) {
  const double num = (c.rho + c.mu) * y + c.sigma * z;
  // -num^2/den = -num * beta_tilde; cancels exactly against mu y when rho = 0, y = 1/2.
  return -num * beta_tilde_at(c, y, z) + c.mu * y + c.sigma * z;
}

double driver(const CoefficientModel& model, double t, double y, double z) {
  return driver(model.at(t), y, z);
}

double beta_tilde_at(const CoefficientModel& model, double t, double y, double z) {
  return beta_tilde_at(model.at(t), y, z);
}

// ---------------------------------------------------------------------------

ValueSolution solve_y_ow(double rho, double horizon, const TimeGrid& grid) {
  if (!(rho > 0.0)) throw ModelError("the OW closed form needs rho > 0");
  require_grid_in_horizon(grid, horizon);
  const auto model = CoefficientModel::constant(rho, 0.0, 0.0, 1.0, horizon);
  return from_closed_form(grid, model, SolutionSource::OW, [rho, horizon](double s) {
    return 1.0 / (2.0 + (horizon - s) * rho);
  });
}

ValueSolution solve_y_lambert(double rho, double sigma, double horizon, const TimeGrid& grid) {
  if (!(sigma > 0.0)) throw ModelError("the Lambert-W closed form needs sigma > 0");
  const double s2 = sigma * sigma;
  if (!(2.0 * rho - s2 > 0.0)) throw ModelError("the Lambert-W closed form needs 2 rho - sigma^2 > 0");
  require_grid_in_horizon(grid, horizon);
  const auto model = CoefficientModel::constant(rho, 0.0, sigma, 1.0, horizon);
  const double c = (rho - 0.5 * s2) / s2;
  const double kappa = std::log(2.0) + (2.0 * rho - s2 + rho * rho * horizon) / s2;
  const double log_c = std::log(c);
  return from_closed_form(grid, model, SolutionSource::LambertW,
                          [c, kappa, log_c, rho, s2](double s) {
                            return c / lambert_w0_of_exp(log_c + kappa - rho * rho / s2 * s);
                          });
}

ValueSolution solve_y_deterministic(const CoefficientModel& model, const TimeGrid& grid) {
  if (!model.sigma_vanishes()) throw ModelError("solve_y_deterministic requires sigma = 0");
  require_aligned(grid, model);

  struct Piece {
    double from, to, rho, mu;
  };
  auto pieces = std::make_shared<std::vector<Piece>>();
  const auto& src = model.pieces();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double to = i + 1 < src.size() ? src[i + 1].t_from : model.horizon();
    pieces->push_back({src[i].t_from, to, src[i].rho, src[i].mu});
  }
  // Walk from T backwards over [s, T]: tail_mu = int_{b}^T mu, acc = int_b^T g e^{int_r^T mu} dr.
  const double horizon = model.horizon();
  const bool no_resilience = model.rho_vanishes();
  auto y_at = [pieces, horizon, no_resilience](double s) {
    if (no_resilience) return 0.5;
    double tail_mu = 0.0;
    double acc = 0.0;
    for (auto it = pieces->rbegin(); it != pieces->rend(); ++it) {
      if (it->to <= s) break;
      const double a = std::max(s, it->from);
      const double len = std::min(it->to, horizon) - a;
      if (len <= 0.0) continue;
      const double g = 2.0 * (it->rho + it->mu) * (it->rho + it->mu) / (2.0 * it->rho + it->mu);
      // int_a^b g e^{tail_mu + mu (b - r)} dr = g e^{tail_mu} (e^{mu len} - 1) / mu
      const double growth = it->mu == 0.0 ? len : std::expm1(it->mu * len) / it->mu;
      acc += g * std::exp(tail_mu) * growth;
      tail_mu += it->mu * len;
    }
    return std::exp(tail_mu) / (acc + 2.0);
  };

  SolutionSource source = SolutionSource::OW;
  bool mu_varies = false;
  bool mu_nonzero = false;
  bool negative_rho = false;
  for (const auto& p : src) {
    mu_varies = mu_varies || p.mu != src.front().mu;
    mu_nonzero = mu_nonzero || p.mu != 0.0;
    negative_rho = negative_rho || p.rho < 0.0;
  }
  if (model.rho_vanishes())
    source = SolutionSource::Constant;
  else if (negative_rho)
    source = SolutionSource::NegativeResilience;
  else if (mu_varies)
    source = SolutionSource::PiecewiseJump;
  else if (mu_nonzero)
    source = SolutionSource::OdeIntegrated;
  return from_closed_form(grid, model, source, y_at);
}

ValueSolution solve_y_ode(const CoefficientModel& model, const TimeGrid& grid) {
  require_aligned(grid, model);
  const std::size_t n = grid.n_steps();
  const auto coeffs = step_coefficients(model, grid);
  const double eps = model.conditions().epsilon;

  auto rhs = [&](const Coefficients& c, double y) {
    if (driver_denominator(c, y) < 0.25 * eps) {
      std::ostringstream msg;
      msg << "RK4 step rejected: driver denominator below eps/4 at y = " << y;
      throw ModelError(msg.str());
    }
    return -driver(c, y, 0.0);
  };

  ValueSolution sol;
  sol.grid = grid;
  sol.source = model.rho_vanishes() ? SolutionSource::Constant : SolutionSource::OdeIntegrated;
  sol.y.resize(n + 1);
  sol.y[n] = 0.5;
  const double h = grid.step();
  for (std::size_t k = n; k-- > 0;) {
    const Coefficients& c = coeffs[k];
    const double y = sol.y[k + 1];
    // Integrate in reversed time u = T - s, where dY/du = f.
    const double k1 = rhs(c, y);
    const double k2 = rhs(c, y - 0.5 * h * k1);
    const double k3 = rhs(c, y - 0.5 * h * k2);
    const double k4 = rhs(c, y - h * k3);
    sol.y[k] = clamp_value(y - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }

  // Cubic Hermite dense output using the one-sided slopes of each step.
  auto shared_y = std::make_shared<std::vector<double>>(sol.y);
  auto shared_c = std::make_shared<std::vector<Coefficients>>(coeffs);
  sol.y_at = [shared_y, shared_c, grid](double s) {
    const auto& y = *shared_y;
    const std::size_t n_steps = grid.n_steps();
    double pos = (s - grid.t0()) / grid.step();
    if (pos <= 0.0) return y.front();
    if (pos >= static_cast<double>(n_steps)) return y.back();
    auto k = static_cast<std::size_t>(pos);
    if (k >= n_steps) k = n_steps - 1;
    const double u = pos - static_cast<double>(k);
    const double h_step = grid.step();
    const Coefficients& c = (*shared_c)[k];
    const double m0 = -driver(c, y[k], 0.0) * h_step;
    const double m1 = -driver(c, y[k + 1], 0.0) * h_step;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y[k] + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * y[k + 1] +
           (u3 - u2) * m1;
  };
  attach_beta(sol, model);
  return sol;
}

double ode_residual(const ValueSolution& solution, const CoefficientModel& model) {
  const TimeGrid& grid = solution.grid;
  const double h = grid.step();
  double worst = 0.0;
  for (std::size_t k = 1; k < grid.n_steps(); ++k) {
    const Coefficients before = model.on_interval(grid.time(k - 1), grid.time(k));
    const Coefficients after = model.on_interval(grid.time(k), grid.time(k + 1));
    if (before.rho != after.rho || before.mu != after.mu || before.sigma != after.sigma) continue;
    const double slope = (solution.y[k + 1] - solution.y[k - 1]) / (2.0 * h);
    const double target = -driver(after, solution.y[k], solution.z.empty() ? 0.0 : solution.z[k]);
    worst = std::max(worst, std::abs(slope - target));
  }
  return worst;
}

// ---------------------------------------------------------------------------

double discrete_value_step(double y_next, const Coefficients& c, double h) {
  const double s2 = c.sigma * c.sigma;
  const double e = std::exp(-c.rho * h);             // deterministic decay over the step
  const double m1 = std::exp(c.mu * h);              // E[Gamma]
  const double m_inv = std::exp((s2 - c.mu) * h);    // E[1 / Gamma]
  // E[Y (e - Gamma)] and E[Y Gamma^{-1} (e - Gamma)^2 + (1 - Gamma^{-1} e^2) / 2]
  const double cross = y_next * (e - m1);
  if (cross == 0.0) return y_next * m1;
  const double den = y_next * (e * e * m_inv - 2.0 * e + m1) + 0.5 * (1.0 - e * e * m_inv);
  if (!(den > 0.0)) throw ModelError("degenerate denominator in the discrete value recursion");
  return y_next * m1 - cross * cross / den;
}

DiscreteValue discrete_value_recursion(const CoefficientModel& model, double h) {
  const TimeGrid grid = TimeGrid::with_step(model.horizon(), h);
  require_aligned(grid, model);
  const auto coeffs = step_coefficients(model, grid);
  DiscreteValue out{grid, grid.step(), std::vector<double>(grid.size())};
  out.y_h.back() = 0.5;
  for (std::size_t k = grid.n_steps(); k-- > 0;)
    out.y_h[k] = discrete_value_step(out.y_h[k + 1], coeffs[k], grid.step());
  return out;
}

}  // namespace execlab
