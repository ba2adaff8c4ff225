#pragma once

#include "execlab/coefficients.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>

namespace execlab {

/// Model and sampling settings shared by every experiment config:
///   {"T": 10, "gamma0": 1, "pieces": [{"t_from": 0, "rho": 0.5, "mu": 0, "sigma": 0.8}],
///    "grid_steps": 10000, "n_paths": 100000, "seed": 42}
struct ModelConfig {
  std::optional<CoefficientModel> model;
  std::size_t grid_steps = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Throws ModelError naming the offending field.
CoefficientModel model_from_json(const nlohmann::json& j);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const CoefficientModel& model);

/// Reads and parses a JSON file; parse errors carry the path.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace execlab
