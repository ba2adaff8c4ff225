#include <execlab/config.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace execlab;
using nlohmann::json;

namespace {

json valid() {
  return json::parse(R"({"T": 10, "gamma0": 2, "pieces": [{"t_from": 0, "rho": 0.5, "mu": 0.1, "sigma": 0.8},
                                                  {"t_from": 4, "rho": 0.3, "mu": 0, "sigma": 0.2}],
                          "grid_steps": 100, "n_paths": 10, "seed": 42})");
}

}  // namespace

TEST(Config, ParsesModelAndSampling) {
  const ModelConfig c = model_config_from_json(valid());
  ASSERT_TRUE(c.model.has_value());
  EXPECT_EQ(c.model->horizon(), 10.0);
  EXPECT_EQ(c.model->gamma0(), 2.0);
  ASSERT_EQ(c.model->pieces().size(), 2U);
  EXPECT_EQ(c.model->pieces()[1].sigma, 0.2);
  EXPECT_EQ(c.grid_steps, 100U);
  EXPECT_EQ(c.n_paths, 10U);
  EXPECT_EQ(c.seed, 42U);
}

TEST(Config, Defaults) {
  json j = valid();
  j.erase("n_paths");
  j.erase("seed");
  const ModelConfig c = model_config_from_json(j);
  EXPECT_EQ(c.n_paths, 1U);
  EXPECT_EQ(c.seed, 0U);
}

TEST(Config, RoundTrip) {
  const CoefficientModel m = model_from_json(valid());
  const CoefficientModel back = model_from_json(model_to_json(m));
  EXPECT_EQ(m.hash(), back.hash());
}

TEST(Config, ErrorsNameTheField) {
  auto expect_error = [](json j, const std::string& needle) {
    try {
      (void)model_config_from_json(j);
      ADD_FAILURE() << "no error for " << needle;
    } catch (const std::exception& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  json j = valid();
  j.erase("T");
  expect_error(j, "T");
  j = valid();
  j["grid_steps"] = 0;
  expect_error(j, "grid_steps");
  j = valid();
  j["pieces"][0]["rho"] = "fast";
  expect_error(j, "rho");
  j = valid();
  j["pieces"][0]["rho"] = 0.1;
  expect_error(j, "2*rho + mu - sigma^2");
}

TEST(Config, ReadJsonFileReportsPath) {
  const auto path = std::filesystem::temp_directory_path() / "execlab_bad_config.json";
  std::ofstream(path) << "{ not json";
  try {
    (void)read_json_file(path);
    ADD_FAILURE();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
  EXPECT_THROW((void)read_json_file("/nonexistent/execlab.json"), std::exception);
  std::filesystem::remove(path);
}
