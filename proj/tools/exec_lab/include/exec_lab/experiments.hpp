#pragma once

#include <execlab/bsde.hpp>
#include <execlab/config.hpp>
#include <execlab/strategy.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace exec_lab {

inline constexpr int kSummarySchemaVersion = 1;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputEnv = "EXEC_LAB_OUT";

/// EXEC_LAB_OUT if set and non-empty, otherwise ./exec-lab-out.
std::filesystem::path default_output_dir();

struct ExperimentConfig {
  std::string experiment;
  execlab::ModelConfig model;
  double x = 1.0;
  double d = 0.0;
  double t = 0.0;
  double nu = 0.0;
  std::string strategy = "hold";  // quadratic_representation: hold | linear
  std::filesystem::path out;
};

/// Top-level keys: experiment, T, gamma0, pieces, grid_steps, n_paths, seed,
/// and as applicable x, d, t, nu, strategy, out.
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& default_out);

std::vector<std::string> experiment_tags();
std::vector<std::string> figure_names();

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct RunResult {
  std::string experiment;
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;
  bool passed = false;
};

/// Writes the experiment's CSV artifacts and summary.json into config.out.
/// Throws on an unknown tag or a model outside the experiment's regime.
RunResult run_experiment(const ExperimentConfig& config);

/// The configuration behind one of the figures: lambertw, jump, negres.
ExperimentConfig figure_config(std::string_view name, std::uint64_t seed,
                               const std::filesystem::path& out);

RunResult reproduce_figure(std::string_view name, const std::filesystem::path& out,
                           std::uint64_t seed);

/// Picks the closed form when one applies, else the ODE solver.
execlab::ValueSolution solve_value(const execlab::CoefficientModel& model,
                                   const execlab::TimeGrid& grid);

/// CSV writers for the exported tables.
void write_value_solution(const execlab::ValueSolution& solution,
                          const std::filesystem::path& path);
void write_discrete_value(const execlab::DiscreteValue& value, const std::filesystem::path& path);
void write_plan(const execlab::OptimalPlan& plan, const std::filesystem::path& path);
/// Columns t, X_pre, X, D_pre, D, A, gamma.
void write_deviation(const execlab::Strategy& strategy, std::span<const double> x_pre,
                     const execlab::DeviationPath& deviation, const execlab::MarketPath& market,
                     const std::filesystem::path& path);

nlohmann::json checks_to_json(const std::vector<Check>& checks);

}  // namespace exec_lab
