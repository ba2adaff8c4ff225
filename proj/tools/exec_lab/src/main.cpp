#include "exec_lab/acceptance.hpp"
#include "exec_lab/experiments.hpp"

#include <execlab/config.hpp>

#include <CLI11.hpp>

#include <exception>
#include <iostream>

namespace {

int run_command(const std::string& config_path) {
  const auto json = execlab::read_json_file(config_path);
  const auto config = exec_lab::config_from_json(json, exec_lab::default_output_dir());
  const auto result = exec_lab::run_experiment(config);
  std::cout << result.summary.dump(2) << '\n';
  return result.passed ? 0 : 1;
}

int figure_command(const std::string& name, const std::string& out, std::uint64_t seed) {
  const auto result = exec_lab::reproduce_figure(name, out, seed);
  std::cout << result.summary.dump(2) << '\n';
  return result.passed ? 0 : 1;
}

int selftest_command(const std::string& out, std::uint64_t seed) {
  exec_lab::acceptance::SuiteOptions options;
  options.seed = seed;
  options.on_result = [](const exec_lab::acceptance::CriterionResult& r) {
    std::cout << exec_lab::acceptance::format_line(r) << std::endl;
  };
  const auto report = exec_lab::acceptance::run_selftest(out, options);
  std::cout << (report.passed ? "selftest PASS" : "selftest FAIL") << '\n';
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exec-lab: optimal execution under stochastic impact and resilience"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("--config", config_path, "Experiment config file")->required();

  std::string figure_name;
  std::string figure_out;
  std::uint64_t figure_seed = 1;
  auto* figure = app.add_subcommand("figure", "Reproduce a figure's data");
  figure->add_option("name", figure_name, "Figure name")
      ->required()
      ->check(CLI::IsMember(exec_lab::figure_names()));
  figure->add_option("--out", figure_out, "Output directory")->required();
  figure->add_option("--seed", figure_seed, "Master seed");

  std::string selftest_out = (exec_lab::default_output_dir() / "selftest").string();
  std::uint64_t selftest_seed = exec_lab::acceptance::SuiteOptions{}.seed;
  auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria");
  selftest->add_option("--out", selftest_out, "Output directory");
  selftest->add_option("--seed", selftest_seed, "Master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path);
    if (*figure) return figure_command(figure_name, figure_out, figure_seed);
    if (*selftest) return selftest_command(selftest_out, selftest_seed);
  } catch (const std::exception& e) {
    std::cerr << "exec-lab: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
