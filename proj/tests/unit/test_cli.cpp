#include "exec_lab/csv.hpp"
#include "exec_lab/experiments.hpp"

#include <gtest/gtest.h>

#include <clocale>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace exec_lab;
namespace fs = std::filesystem;

namespace {

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json ow_config() {
  return nlohmann::json::parse(R"({"experiment": "ow_value", "T": 10, "gamma0": 1,
      "pieces": [{"t_from": 0, "rho": 0.5, "mu": 0, "sigma": 0}], "grid_steps": 500, "x": 2})");
}

}  // namespace

TEST(Csv, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, IgnoresGlobalLocale) {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") == nullptr) GTEST_SKIP() << "locale not installed";
  EXPECT_EQ(format_double(1.5), "1.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(Csv, HeaderAndColumns) {
  CsvTable t({"t", "y"});
  const std::vector<double> a{0.0, 1.0};
  const std::vector<double> b{0.5, 0.25};
  t.add_column(a);
  t.add_column(b);
  EXPECT_EQ(t.str(), "t,y\n0,0.5\n1,0.25\n");
  const std::vector<double> c{1.0};
  EXPECT_THROW(t.add_column(c), std::exception);
}

TEST(ExperimentConfig, ParsesExtensionsAndDefaults) {
  const ExperimentConfig c = config_from_json(ow_config(), "fallback");
  EXPECT_EQ(c.experiment, "ow_value");
  EXPECT_EQ(c.x, 2.0);
  EXPECT_EQ(c.d, 0.0);
  EXPECT_EQ(c.out, fs::path("fallback"));
  auto bad = ow_config();
  bad["experiment"] = "nope";
  EXPECT_THROW(config_from_json(bad, "x"), std::exception);
  bad = ow_config();
  bad["x"] = "many";
  EXPECT_THROW(config_from_json(bad, "x"), std::exception);
}

TEST(Experiments, OwValueWritesVersionedSummaryAndCsv) {
  auto j = ow_config();
  const fs::path out = fs::temp_directory_path() / "execlab_cli_test_ow";
  fs::remove_all(out);
  j["out"] = out.string();
  const RunResult r = run_experiment(config_from_json(j, "unused"));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.summary.at("schema_version"), kSummarySchemaVersion);
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  const std::string value = read(out / "value_solution.csv");
  EXPECT_EQ(value.substr(0, value.find('\n')), "t,y,beta_tilde");
  const std::string plan = read(out / "plan.csv");
  EXPECT_EQ(plan.substr(0, plan.find('\n')), "t,X_star,D_star,gamma,beta,exp_q");
  const std::string dev = read(out / "deviation.csv");
  EXPECT_EQ(dev.substr(0, dev.find('\n')), "t,X_pre,X,D_pre,D,A,gamma");
  fs::remove_all(out);
}

TEST(Experiments, RegimeMismatchThrows) {
  auto j = ow_config();
  j["pieces"][0]["sigma"] = 0.5;
  EXPECT_THROW(run_experiment(config_from_json(j, fs::temp_directory_path() / "execlab_x")),
               std::exception);
}

TEST(Experiments, FiguresAreRegistered) {
  for (const auto& name : figure_names()) {
    const ExperimentConfig c = figure_config(name, 1, "o");
    EXPECT_EQ(c.experiment, "figure_" + name);
  }
}

TEST(Experiments, DefaultOutputFromEnvironment) {
  setenv(kOutputEnv, "/tmp/execlab_env_out", 1);
  EXPECT_EQ(default_output_dir(), fs::path("/tmp/execlab_env_out"));
  unsetenv(kOutputEnv);
  EXPECT_EQ(default_output_dir(), fs::path("exec-lab-out"));
}
