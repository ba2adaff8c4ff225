#include "exec_lab/experiments.hpp"

#include "exec_lab/csv.hpp"

#include <execlab/cost.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

namespace exec_lab {

using namespace execlab;
namespace fs = std::filesystem;

namespace {

double rel_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Check check_le(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, value <= tolerance};
}

bool is_ow_regime(const CoefficientModel& m) {
  return m.is_constant() && m.pieces().front().mu == 0.0 && m.pieces().front().sigma == 0.0 &&
         m.pieces().front().rho > 0.0;
}

bool is_lambert_regime(const CoefficientModel& m) {
  return m.is_constant() && m.pieces().front().mu == 0.0 && m.pieces().front().sigma > 0.0;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ModelError(message);
}

struct Setup {
  const ExperimentConfig& cfg;
  CoefficientModel model;
  TimeGrid grid;
  std::size_t start;
};

Setup make_setup(const ExperimentConfig& cfg) {
  require(cfg.model.model.has_value(), "experiment config has no model");
  const CoefficientModel& model = *cfg.model.model;
  TimeGrid grid = TimeGrid::uniform(model.horizon(), cfg.model.grid_steps);
  require_aligned(grid, model);
  require(grid.contains_point(cfg.t), "start time t must be a grid point");
  const std::size_t start = grid.index_of(cfg.t);
  require(start < grid.n_steps(), "start time t must precede T");
  return {cfg, model, grid, start};
}

void require_start_at_zero(const Setup& s) {
  require(s.start == 0, "Monte Carlo cost experiments start at t = 0");
}

nlohmann::json base_summary(const Setup& s) {
  return {{"schema_version", kSummarySchemaVersion},
          {"experiment", s.cfg.experiment},
          {"model", model_to_json(s.model)},
          {"model_hash", s.model.hash()},
          {"grid_steps", s.grid.n_steps()},
          {"h", s.grid.step()},
          {"n_paths", s.cfg.model.n_paths},
          {"seed", s.cfg.model.seed},
          {"x", s.cfg.x},
          {"d", s.cfg.d},
          {"t", s.cfg.t}};
}

RunResult finish(const Setup& s, nlohmann::json summary, const std::vector<Check>& checks,
                 std::vector<fs::path> files) {
  RunResult r;
  r.experiment = s.cfg.experiment;
  r.passed = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  summary["checks"] = checks_to_json(checks);
  summary["passed"] = r.passed;
  nlohmann::json names = nlohmann::json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  names.push_back("summary.json");
  summary["files"] = names;
  const fs::path summary_path = s.cfg.out / "summary.json";
  write_text(summary_path, summary.dump(2) + "\n");
  files.push_back(summary_path);
  r.summary = std::move(summary);
  r.files = std::move(files);
  return r;
}

double plan_grid_cost(const CoefficientModel& model, const OptimalPlan& plan, double d) {
  const DeviationPath dev = deviation_path(model, plan.market, plan.x_star, d);
  return pathwise_cost(plan.x_star, dev, plan.market);
}

std::vector<double> previous_values(const Strategy& s) {
  std::vector<double> out(s.values().size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = k == 0 ? s.x_pre() : s.values()[k - 1];
  return out;
}

// Largest relative deviation of (X* - alpha D*)/E(Q) from x - d/gamma_t.
double impact_state_gap(const OptimalPlan& plan) {
  const double lambda = plan.x - plan.d / plan.gamma.front();
  double worst = 0.0;
  for (std::size_t j = 0; j < plan.grid.size(); ++j) {
    const double a = plan.d_star.impact_state[j] / plan.exp_q[j];
    worst = std::max(worst, rel_gap(a, lambda));
  }
  return worst;
}

// ---------------------------------------------------------------------------

RunResult run_ow_value(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  require(is_ow_regime(s.model), "ow_value needs constant rho > 0 with mu = sigma = 0");
  const double rho = s.model.pieces().front().rho;
  const double horizon = s.model.horizon();

  const ValueSolution sol = solve_y_ow(rho, horizon, s.grid);
  const OptimalPlan plan = optimal_plan(
      s.model, sol, simulate_path(s.model, s.grid, cfg.model.seed, 0), s.start, cfg.x, cfg.d);
  const double cost_h = plan_grid_cost(s.model, plan, cfg.d);
  const TimeGrid half = TimeGrid::uniform(horizon, 2 * s.grid.n_steps());
  const double cost_half = plan_grid_cost(
      s.model,
      optimal_plan(s.model, solve_y_ow(rho, horizon, half),
                   simulate_path(s.model, half, cfg.model.seed, 0), half.index_of(cfg.t), cfg.x,
                   cfg.d),
      cfg.d);

  const double gamma_t = plan.gamma.front();
  const double v = value_function(sol.y[s.start], gamma_t, cfg.x, cfg.d).v;
  const double y_closed = 1.0 / (2.0 + (horizon - cfg.t) * rho);
  const double v_closed = value_function(y_closed, gamma_t, cfg.x, cfg.d).v;
  const double err_h = std::abs(cost_h - v);
  const double err_half = std::abs(cost_half - v);
  const double scale = std::max(1.0, std::abs(v));

  const fs::path dir = cfg.out;
  write_value_solution(sol, dir / "value_solution.csv");
  write_plan(plan, dir / "plan.csv");
  const DeviationPath dev = deviation_path(s.model, plan.market, plan.x_star, cfg.d);
  write_deviation(plan.x_star, previous_values(plan.x_star), dev, plan.market,
                  dir / "deviation.csv");

  nlohmann::json summary = base_summary(s);
  summary["results"] = {{"V", v},
                        {"Y_t", sol.y[s.start]},
                        {"grid_cost_h", cost_h},
                        {"grid_cost_half_h", cost_half},
                        {"grid_cost_error_h", err_h},
                        {"grid_cost_error_half_h", err_half},
                        {"error_ratio", err_half > 0.0 ? err_h / err_half : 0.0}};
  summary["references"] = {{"V_closed_form", v_closed}, {"Y_closed_form", y_closed}};
  std::vector<Check> checks{
      check_le("value_matches_closed_form", std::abs(v - v_closed), 1e-12 * scale),
      check_le("grid_cost_error_within_h", err_h, s.grid.step() * scale),
      check_le("impact_state_constancy", impact_state_gap(plan), 1e-10)};
  return finish(s, std::move(summary), checks,
                {dir / "value_solution.csv", dir / "plan.csv", dir / "deviation.csv"});
}

RunResult run_lambert_value(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  require(is_lambert_regime(s.model), "lambert_value needs constant rho, sigma > 0 and mu = 0");
  require_start_at_zero(s);
  const auto& p = s.model.pieces().front();
  const ValueSolution sol = solve_y_lambert(p.rho, p.sigma, s.model.horizon(), s.grid);
  auto schedule = std::make_shared<const PlanSchedule>(plan_schedule(s.model, sol));

  const CostEstimate est =
      estimate_paths(s.model, s.grid, cfg.model.n_paths, cfg.model.seed, [&](const MarketPath& m) {
        const OptimalPlan plan = optimal_plan(schedule, m, 0, cfg.x, cfg.d);
        return plan_grid_cost(s.model, plan, cfg.d);
      });
  const double v = value_function(sol.y[0], s.model.gamma0(), cfg.x, cfg.d).v;
  const OptimalPlan plan =
      optimal_plan(schedule, simulate_path(s.model, s.grid, cfg.model.seed, 0), 0, cfg.x, cfg.d);

  const fs::path dir = cfg.out;
  write_value_solution(sol, dir / "value_solution.csv");
  write_plan(plan, dir / "plan.csv");
  write_text(dir / "cost_estimate.json", est.to_json().dump(2) + "\n");

  nlohmann::json summary = base_summary(s);
  summary["results"] = {{"cost", est.to_json()}, {"Y_0", sol.y[0]}};
  summary["references"] = {{"V", v}};
  std::vector<Check> checks{
      check_le("cost_matches_value_3se", std::abs(est.mean - v), 3.0 * est.std_error),
      check_le("impact_state_constancy", impact_state_gap(plan), 1e-10)};
  return finish(s, std::move(summary), checks,
                {dir / "value_solution.csv", dir / "plan.csv", dir / "cost_estimate.json"});
}

RunResult run_naive_cost_brownian(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  require(s.model.is_constant() && s.model.sigma_vanishes() &&
              s.model.pieces().front().mu == 0.0 && s.model.pieces().front().rho != 0.0,
          "naive_cost_brownian needs constant rho != 0 with mu = sigma = 0");
  require_start_at_zero(s);
  const double rho = s.model.pieces().front().rho;
  const auto est = estimate_paths_multi(
      s.model, s.grid, cfg.model.n_paths, cfg.model.seed, 2,
      [&](const MarketPath& m, std::span<double> out) {
        const Strategy x = counterexample_brownian(cfg.nu, m);
        out[0] = pathwise_cost_naive(x, naive_deviation_path(s.model, m, x), m);
        out[1] = pathwise_cost(x, deviation_path(s.model, m, x), m);
      });
  const double reference = closed_form_tildeJ(s.model.gamma0(), rho, s.model.horizon(), cfg.nu);

  const fs::path dir = cfg.out;
  const MarketPath m0 = simulate_path(s.model, s.grid, cfg.model.seed, 0);
  const Strategy x0 = counterexample_brownian(cfg.nu, m0);
  write_deviation(x0, previous_values(x0), naive_deviation_path(s.model, m0, x0), m0,
                  dir / "deviation.csv");
  write_text(dir / "cost_estimate.json", est[0].to_json().dump(2) + "\n");

  nlohmann::json summary = base_summary(s);
  summary["nu"] = cfg.nu;
  summary["results"] = {{"naive_cost", est[0].to_json()}, {"corrected_cost", est[1].to_json()}};
  summary["references"] = {
      {"closed_form_tildeJ", reference},
      {"quadratic_variation_charge", 0.5 * s.model.gamma0() * cfg.nu * cfg.nu * s.model.horizon()}};
  std::vector<Check> checks{
      check_le("naive_cost_matches_closed_form_3se", std::abs(est[0].mean - reference),
               3.0 * est[0].std_error)};
  if (cfg.nu != 0.0)
    checks.push_back({"corrected_cost_exceeds_naive", est[1].mean - est[0].mean, 0.0,
                      est[1].mean > est[0].mean});
  return finish(s, std::move(summary), checks, {dir / "deviation.csv", dir / "cost_estimate.json"});
}

RunResult run_naive_dynamics_gbm(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  require(is_lambert_regime(s.model) && s.model.pieces().front().rho > 0.0,
          "naive_dynamics_gbm needs constant rho > 0, sigma > 0 and mu = 0");
  require_start_at_zero(s);
  require(cfg.d == 0.0, "naive_dynamics_gbm starts from d = 0");
  const auto& p = s.model.pieces().front();
  CostOptions options;
  options.scheme = DeviationScheme::Naive;
  const CostEstimate est = estimate_cost(
      s.model, s.grid, cfg.model.n_paths, cfg.model.seed,
      [&](const MarketPath& m) { return counterexample_gbm(cfg.nu, cfg.x, m); }, options);
  const double g0 = s.model.gamma0();
  const double horizon = s.model.horizon();
  const double reference = cfg.nu == 0.0
                               ? 0.5 * g0 * cfg.x * cfg.x
                               : closed_form_J_gbm(g0, cfg.x, p.sigma, p.rho, horizon, cfg.nu);
  nlohmann::json trend = nlohmann::json::array();
  double previous = 0.0;
  bool decreasing = true;
  for (int i = 1; i <= 3; ++i) {
    const double nu = -2.0 * i;
    const double j = closed_form_J_gbm(g0, cfg.x, p.sigma, p.rho, horizon, nu);
    trend.push_back({{"nu", nu}, {"J", j}});
    if (i > 1 && !(j < previous)) decreasing = false;
    previous = j;
  }

  const fs::path dir = cfg.out;
  const MarketPath m0 = simulate_path(s.model, s.grid, cfg.model.seed, 0);
  const Strategy x0 = counterexample_gbm(cfg.nu, cfg.x, m0);
  write_deviation(x0, previous_values(x0), naive_deviation_path(s.model, m0, x0), m0,
                  dir / "deviation.csv");
  write_text(dir / "cost_estimate.json", est.to_json().dump(2) + "\n");

  nlohmann::json summary = base_summary(s);
  summary["nu"] = cfg.nu;
  summary["results"] = {{"cost", est.to_json()}};
  summary["references"] = {{"closed_form_J", reference}, {"closed_form_trend", trend}};
  std::vector<Check> checks{
      check_le("cost_matches_closed_form_3se", std::abs(est.mean - reference), 3.0 * est.std_error),
      {"closed_form_decreasing_in_nu", previous, 0.0, decreasing}};
  return finish(s, std::move(summary), checks, {dir / "deviation.csv", dir / "cost_estimate.json"});
}

RunResult run_discrete_recursion(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  const double h = s.grid.step();
  const DiscreteValue dv = discrete_value_recursion(s.model, h);
  const DiscreteValue dv_half = discrete_value_recursion(s.model, 0.5 * h);
  const ValueSolution sol = solve_value(s.model, s.grid);
  const double err = std::abs(dv.y_h[0] - sol.y[0]);
  const double err_half = std::abs(dv_half.y_h[0] - sol.y[0]);

  const fs::path dir = cfg.out;
  write_discrete_value(dv, dir / "discrete_value.csv");
  write_value_solution(sol, dir / "value_solution.csv");

  nlohmann::json summary = base_summary(s);
  summary["results"] = {{"Y_h_0", dv.y_h[0]},
                        {"Y_half_h_0", dv_half.y_h[0]},
                        {"error_h", err},
                        {"error_half_h", err_half},
                        {"error_ratio", err_half > 0.0 ? err / err_half : 0.0}};
  summary["references"] = {{"Y_0", sol.y[0]}, {"solution_source", to_string(sol.source)}};
  std::vector<Check> checks{check_le("discrete_value_error_within_h", err, h)};
  return finish(s, std::move(summary), checks,
                {dir / "discrete_value.csv", dir / "value_solution.csv"});
}

RunResult run_quadratic_representation(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  require_start_at_zero(s);
  require(cfg.strategy == "hold" || cfg.strategy == "linear",
          "quadratic_representation strategy must be 'hold' or 'linear'");
  const ValueSolution sol = solve_value(s.model, s.grid);
  const RepresentationKernel kernel = representation_kernel(s.model, sol);
  std::vector<double> values(s.grid.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    values[k] = cfg.strategy == "hold"
                    ? cfg.x
                    : cfg.x * (1.0 - s.grid.time(k) / s.model.horizon());
  const Strategy strategy(s.grid, cfg.x, values);

  auto evaluate = [&](const MarketPath& m, std::span<double> out) {
    const DeviationPath dev = deviation_path(s.model, m, strategy, cfg.d);
    out[0] = pathwise_cost(strategy, dev, m);
    out[1] = quadratic_representation_rhs(kernel, m, strategy, dev);
  };

  nlohmann::json summary = base_summary(s);
  summary["strategy"] = cfg.strategy;
  std::vector<Check> checks;
  if (s.model.sigma_vanishes()) {
    const MarketPath m = simulate_path(s.model, s.grid, cfg.model.seed, 0);
    std::array<double, 2> out{};
    evaluate(m, out);
    summary["results"] = {{"direct_cost", out[0]}, {"representation", out[1]}};
    checks.push_back(check_le("representation_matches_direct", std::abs(out[0] - out[1]),
                              1e-6 * std::max(1.0, std::abs(out[0]))));
  } else {
    const auto est =
        estimate_paths_multi(s.model, s.grid, cfg.model.n_paths, cfg.model.seed, 2, evaluate);
    const double combined = std::hypot(est[0].std_error, est[1].std_error);
    summary["results"] = {{"direct_cost", est[0].to_json()},
                          {"representation", est[1].to_json()},
                          {"combined_std_error", combined}};
    checks.push_back(check_le("representation_matches_direct_3se",
                              std::abs(est[0].mean - est[1].mean), 3.0 * combined));
  }
  summary["references"] = {{"V", value_function(sol.y[0], s.model.gamma0(), cfg.x, cfg.d).v}};
  const fs::path dir = cfg.out;
  write_value_solution(sol, dir / "value_solution.csv");
  return finish(s, std::move(summary), checks, {dir / "value_solution.csv"});
}

// ---------------------------------------------------------------------------

struct FigureCase {
  ValueSolution solution;
  OptimalPlan plan;
};

FigureCase build_figure(const Setup& s) {
  const ValueSolution sol = solve_value(s.model, s.grid);
  const MarketPath market = simulate_path(s.model, s.grid, s.cfg.model.seed, 0);
  OptimalPlan plan = optimal_plan(s.model, sol, market, s.start, s.cfg.x, s.cfg.d);
  return {sol, std::move(plan)};
}

std::vector<fs::path> write_figure(const Setup& s, const FigureCase& f) {
  const fs::path dir = s.cfg.out;
  write_value_solution(f.solution, dir / "value_solution.csv");
  write_plan(f.plan, dir / "plan.csv");
  write_deviation(f.plan.x_star, f.plan.x_left, f.plan.d_star, f.plan.market,
                  dir / "deviation.csv");
  return {dir / "value_solution.csv", dir / "plan.csv", dir / "deviation.csv"};
}

std::vector<Check> common_plan_checks(const OptimalPlan& plan) {
  const double u = plan.grid.time(plan.grid.n_steps() / 2);
  return {check_le("impact_state_constancy", impact_state_gap(plan), 1e-10),
          check_le("terminal_position_zero", std::abs(plan.x_star.values().back()), 0.0),
          check_le("dynamic_consistency", dynamic_consistency_check(plan, u), 1e-10)};
}

// Largest relative spread of D* over plan indices [from, to).
double level_spread(const OptimalPlan& plan, std::size_t from, std::size_t to) {
  double worst = 0.0;
  for (std::size_t j = from; j < to; ++j)
    worst = std::max(worst, rel_gap(plan.d_star.values[j], plan.d_star.values[from]));
  return worst;
}

RunResult run_figure_lambertw(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  require(is_lambert_regime(s.model), "figure_lambertw needs constant rho, sigma > 0 and mu = 0");
  const FigureCase f = build_figure(s);
  const OptimalPlan& plan = f.plan;
  const std::size_t n = plan.grid.n_steps();
  const double initial_jump = std::abs(plan.x_star.values()[0] - cfg.x);
  const double terminal_jump = std::abs(plan.x_left[n]);
  std::vector<Check> checks = common_plan_checks(plan);
  checks.push_back({"initial_block_nonzero", initial_jump, 0.0, initial_jump > 0.0});
  checks.push_back({"terminal_block_nonzero", terminal_jump, 0.0, terminal_jump > 0.0});

  nlohmann::json summary = base_summary(s);
  summary["results"] = {{"Y_t", f.solution.y[s.start]},
                        {"initial_block", plan.block_trades.front()},
                        {"terminal_block", plan.block_trades.back()}};
  summary["references"] = nlohmann::json::object();
  return finish(s, std::move(summary), checks, write_figure(s, f));
}

RunResult run_figure_jump(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  const auto& pieces = s.model.pieces();
  require(s.model.sigma_vanishes() && pieces.size() == 2 && pieces[0].rho == pieces[1].rho &&
              pieces[0].mu == 0.0 && pieces[1].mu == 1.0 && pieces[0].rho > 0.0,
          "figure_jump needs sigma = 0, constant rho > 0 and mu = 0 then 1 after one breakpoint");
  const double rho = pieces[0].rho;
  const double t0 = pieces[1].t_from;
  require(s.start < s.grid.index_of(t0), "figure_jump starts before the jump time");
  const FigureCase f = build_figure(s);
  const OptimalPlan& plan = f.plan;
  const std::size_t n = plan.grid.n_steps();
  const std::size_t j0 = s.grid.index_of(t0) - s.start;

  const auto beta_ref = example_beta_path(JumpExample{rho, t0}, s.model.horizon(), s.grid);
  const std::size_t k0 = s.grid.index_of(t0);
  const double jump = plan.beta[j0] - plan.schedule->beta_left[k0];
  const double jump_ref = f.solution.y[k0] / (2.0 * rho + 1.0);
  double beta_gap = 0.0;
  for (std::size_t j = 0; j < plan.grid.size(); ++j)
    beta_gap = std::max(beta_gap, rel_gap(plan.beta[j], beta_ref[s.start + j]));

  // Block trades at interior points other than t0 must vanish.
  double stray = 0.0;
  for (std::size_t j = 1; j < n; ++j)
    if (j != j0) stray = std::max(stray, std::abs(plan.block_trades[j]));
  const double scale = std::max(1.0, std::abs(cfg.x));

  // D* levels on (t, t0) and [t0, T).
  const double level1 = plan.d_star.values[1];
  const double level2 = plan.d_star.values[j0];
  const double gamma_t = plan.gamma.front();
  const double level1_ref = (cfg.d - gamma_t * cfg.x) * f.solution.y[s.start];
  const double level2_ref = level1_ref * (1.0 + 1.0 / (2.0 * rho + 1.0));
  // Initial block trade vanishes iff d = -beta_t gamma_t x / (1 - beta_t).
  const double beta_t = plan.beta.front();
  const double no_block_d = -beta_t / (1.0 - beta_t) * gamma_t * cfg.x;
  const bool expect_initial = std::abs(cfg.d - no_block_d) > 1e-12 * scale;
  const bool has_initial = std::abs(plan.block_trades.front()) > 1e-12 * scale;

  std::vector<Check> checks = common_plan_checks(plan);
  checks.push_back(check_le("beta_matches_example", beta_gap, 1e-10));
  checks.push_back(check_le("beta_jump_at_t0", std::abs(jump - jump_ref), 1e-10));
  checks.push_back(check_le("no_interior_blocks_off_t0", stray, 1e-12 * scale));
  checks.push_back({"block_at_t0_nonzero", std::abs(plan.block_trades[j0]), 0.0,
                    std::abs(plan.block_trades[j0]) > 1e-12 * scale});
  checks.push_back({"initial_block_classification", has_initial ? 1.0 : 0.0,
                    expect_initial ? 1.0 : 0.0, has_initial == expect_initial});
  if (cfg.d == 0.0) {
    checks.push_back(check_le("deviation_level_before_t0", level_spread(plan, 1, j0), 1e-10));
    checks.push_back(check_le("deviation_level_after_t0", level_spread(plan, j0, n), 1e-10));
    checks.push_back(check_le("deviation_levels_closed_form",
                              std::max(rel_gap(level1, level1_ref), rel_gap(level2, level2_ref)),
                              1e-10));
  }

  nlohmann::json summary = base_summary(s);
  summary["results"] = {{"t0", t0},
                        {"beta_jump", jump},
                        {"deviation_levels", {level1, level2}},
                        {"initial_block", plan.block_trades.front()},
                        {"block_at_t0", plan.block_trades[j0]},
                        {"terminal_block", plan.block_trades.back()}};
  summary["references"] = {{"beta_jump", jump_ref},
                           {"deviation_levels", {level1_ref, level2_ref}},
                           {"no_initial_block_d", no_block_d}};
  return finish(s, std::move(summary), checks, write_figure(s, f));
}

RunResult run_figure_negres(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  require(s.model.is_constant() && s.model.sigma_vanishes() && s.model.pieces().front().rho < 0.0,
          "figure_negres needs constant rho < 0 and sigma = 0");
  const auto& p = s.model.pieces().front();
  const FigureCase f = build_figure(s);
  const OptimalPlan& plan = f.plan;
  const std::size_t n = plan.grid.n_steps();

  const auto beta_ref =
      example_beta_path(NegativeResilienceExample{p.rho, p.mu}, s.model.horizon(), s.grid);
  double beta_gap = 0.0;
  double beta_min = plan.beta.front();
  for (std::size_t j = 0; j < plan.grid.size(); ++j) {
    beta_gap = std::max(beta_gap, rel_gap(plan.beta[j], beta_ref[s.start + j]));
    beta_min = std::min(beta_min, plan.beta[j]);
  }
  // Monotone on (t, T]: every increment after the first grid point has one sign.
  const auto& xs = plan.x_star.values();
  bool up = false;
  bool down = false;
  for (std::size_t j = 2; j <= n; ++j) {
    up = up || xs[j] > xs[j - 1];
    down = down || xs[j] < xs[j - 1];
  }
  const bool monotone = !(up && down);

  std::vector<Check> checks = common_plan_checks(plan);
  checks.push_back(check_le("beta_matches_example", beta_gap, 1e-10));
  checks.push_back({"beta_above_mu_over_rho_plus_mu", beta_min, p.mu / (p.rho + p.mu),
                    beta_min > p.mu / (p.rho + p.mu)});
  checks.push_back(check_le("deviation_constant_on_interior", level_spread(plan, 1, n), 1e-10));
  checks.push_back({"position_monotone_after_start", monotone ? 1.0 : 0.0, 1.0, monotone});
  if (cfg.d == 0.0)
    checks.push_back({"initial_trade_overshoots", std::abs(xs[0] - cfg.x), std::abs(cfg.x),
                      std::abs(xs[0] - cfg.x) > std::abs(cfg.x)});

  nlohmann::json summary = base_summary(s);
  summary["results"] = {{"deviation_level", plan.d_star.values[1]},
                        {"X_star_0", xs[0]},
                        {"beta_min", beta_min}};
  summary["references"] = {{"beta_lower_bound", p.mu / (p.rho + p.mu)}};
  return finish(s, std::move(summary), checks, write_figure(s, f));
}

using Runner = RunResult (*)(const ExperimentConfig&);

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r{
      {"ow_value", run_ow_value},
      {"lambert_value", run_lambert_value},
      {"naive_cost_brownian", run_naive_cost_brownian},
      {"naive_dynamics_gbm", run_naive_dynamics_gbm},
      {"discrete_recursion", run_discrete_recursion},
      {"quadratic_representation", run_quadratic_representation},
      {"figure_lambertw", run_figure_lambertw},
      {"figure_jump", run_figure_jump},
      {"figure_negres", run_figure_negres},
  };
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

fs::path default_output_dir() {
  const char* env = std::getenv(kOutputEnv);
  if (env != nullptr && *env != '\0') return fs::path(env);
  return fs::path("exec-lab-out");
}

ExperimentConfig config_from_json(const nlohmann::json& j, const fs::path& default_out) {
  if (!j.is_object()) throw ModelError("config must be a JSON object");
  ExperimentConfig c;
  if (!j.contains("experiment")) throw ModelError("missing config field 'experiment'");
  c.experiment = j.at("experiment").get<std::string>();
  if (!registry().contains(c.experiment))
    throw ModelError("unknown experiment tag '" + c.experiment + "'");
  c.model = model_config_from_json(j);
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ModelError(std::string("config field '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  c.x = number("x", c.x);
  c.d = number("d", c.d);
  c.t = number("t", c.t);
  c.nu = number("nu", c.nu);
  if (j.contains("strategy")) c.strategy = j.at("strategy").get<std::string>();
  c.out = j.contains("out") ? fs::path(j.at("out").get<std::string>()) : default_out;
  return c;
}

std::vector<std::string> experiment_tags() {
  std::vector<std::string> tags;
  for (const auto& [tag, runner] : registry()) tags.push_back(tag);
  return tags;
}

std::vector<std::string> figure_names() { return {"lambertw", "jump", "negres"}; }

RunResult run_experiment(const ExperimentConfig& config) {
  const auto it = registry().find(config.experiment);
  if (it == registry().end())
    throw ModelError("unknown experiment tag '" + config.experiment + "'");
  return it->second(config);
}

ExperimentConfig figure_config(std::string_view name, std::uint64_t seed, const fs::path& out) {
  ExperimentConfig c;
  c.x = 100.0;
  c.d = 0.0;
  c.out = out;
  c.model.seed = seed;
  c.model.n_paths = 1;
  if (name == "lambertw") {
    c.experiment = "figure_lambertw";
    c.model.model = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 10.0);
    c.model.grid_steps = 10000;
  } else if (name == "jump") {
    c.experiment = "figure_jump";
    c.model.model = example_model(JumpExample{0.3, 4.0}, 5.0);
    c.model.grid_steps = 5000;
  } else if (name == "negres") {
    c.experiment = "figure_negres";
    c.model.model = example_model(NegativeResilienceExample{-0.1, 0.5}, 5.0);
    c.model.grid_steps = 5000;
  } else {
    throw ModelError("unknown figure '" + std::string(name) + "' (expected lambertw, jump or negres)");
  }
  return c;
}

RunResult reproduce_figure(std::string_view name, const fs::path& out, std::uint64_t seed) {
  return run_experiment(figure_config(name, seed, out));
}

ValueSolution solve_value(const CoefficientModel& model, const TimeGrid& grid) {
  if (is_ow_regime(model))
    return solve_y_ow(model.pieces().front().rho, model.horizon(), grid);
  if (model.sigma_vanishes()) return solve_y_deterministic(model, grid);
  const auto& p = model.pieces().front();
  if (is_lambert_regime(model) && 2.0 * p.rho - p.sigma * p.sigma > 0.0)
    return solve_y_lambert(p.rho, p.sigma, model.horizon(), grid);
  return solve_y_ode(model, grid);
}

void write_value_solution(const ValueSolution& solution, const fs::path& path) {
  std::vector<double> t(solution.grid.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = solution.grid.time(k);
  CsvTable table({"t", "y", "beta_tilde"});
  table.add_column(t);
  table.add_column(solution.y);
  table.add_column(solution.beta_tilde);
  table.write(path);
}

void write_discrete_value(const DiscreteValue& value, const fs::path& path) {
  std::vector<double> t(value.grid.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = value.grid.time(k);
  CsvTable table({"t", "y_h"});
  table.add_column(t);
  table.add_column(value.y_h);
  table.write(path);
}

void write_plan(const OptimalPlan& plan, const fs::path& path) {
  std::vector<double> t(plan.grid.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = plan.grid.time(k);
  CsvTable table({"t", "X_star", "D_star", "gamma", "beta", "exp_q"});
  table.add_column(t);
  table.add_column(plan.x_star.values());
  table.add_column(plan.d_star.values);
  table.add_column(plan.gamma);
  table.add_column(plan.beta);
  table.add_column(plan.exp_q);
  table.write(path);
}

void write_deviation(const Strategy& strategy, std::span<const double> x_pre,
                     const DeviationPath& deviation, const MarketPath& market,
                     const fs::path& path) {
  std::vector<double> t(market.grid.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = market.grid.time(k);
  CsvTable table({"t", "X_pre", "X", "D_pre", "D", "A", "gamma"});
  table.add_column(t);
  table.add_column(x_pre);
  table.add_column(strategy.values());
  table.add_column(deviation.pre_trade);
  table.add_column(deviation.values);
  table.add_column(deviation.impact_state);
  table.add_column(market.gamma);
  table.write(path);
}

nlohmann::json checks_to_json(const std::vector<Check>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks)
    out.push_back(
        {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
  return out;
}

}  // namespace exec_lab
