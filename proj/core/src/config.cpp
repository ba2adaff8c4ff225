#include "execlab/config.hpp"

#include <fstream>
#include <sstream>

namespace execlab {

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw ModelError(std::string("missing config field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("config field '") + name + "': " + e.what());
  }
}

template <typename T>
T field_or(const nlohmann::json& j, const char* name, T fallback) {
  return j.contains(name) ? field<T>(j, name) : fallback;
}

}  // namespace

CoefficientModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ModelError("model config must be a JSON object");
  const auto horizon = field<double>(j, "T");
  const auto gamma0 = field<double>(j, "gamma0");
  const auto& raw = j.contains("pieces") ? j.at("pieces") : throw ModelError("missing config field 'pieces'");
  if (!raw.is_array() || raw.empty()) throw ModelError("config field 'pieces' must be a non-empty array");
  std::vector<CoefficientPiece> pieces;
  for (const auto& p : raw) {
    pieces.push_back({field_or<double>(p, "t_from", 0.0), field_or<double>(p, "rho", 0.0),
                      field_or<double>(p, "mu", 0.0), field_or<double>(p, "sigma", 0.0)});
  }
  return CoefficientModel::build(std::move(pieces), gamma0, horizon);
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.model = model_from_json(j);
  const auto steps = field<std::int64_t>(j, "grid_steps");
  if (steps <= 0) throw ModelError("config field 'grid_steps' must be positive");
  c.grid_steps = static_cast<std::size_t>(steps);
  const auto paths = field_or<std::int64_t>(j, "n_paths", 1);
  if (paths <= 0) throw ModelError("config field 'n_paths' must be positive");
  c.n_paths = static_cast<std::size_t>(paths);
  c.seed = field_or<std::uint64_t>(j, "seed", 0);
  return c;
}

nlohmann::json model_to_json(const CoefficientModel& model) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : model.pieces())
    pieces.push_back({{"t_from", p.t_from}, {"rho", p.rho}, {"mu", p.mu}, {"sigma", p.sigma}});
  return {{"T", model.horizon()}, {"gamma0", model.gamma0()}, {"pieces", pieces}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace execlab
