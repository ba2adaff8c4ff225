#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace exec_lab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json data;  // deterministic numbers only; written as an artifact
};

struct SuiteOptions {
  std::uint64_t seed = 20200506;
  double budget_seconds = 900.0;
  std::function<void(const CriterionResult&)> on_result;
};

/// Criteria 1 to 9. Artifacts (CSV, JSON) go under `dir`.
std::vector<CriterionResult> run_criteria(const std::filesystem::path& dir,
                                          const SuiteOptions& options);

struct SelftestReport {
  std::vector<CriterionResult> criteria;  // 1 to 10
  bool passed = false;
  double seconds = 0.0;
};

/// Runs criteria 1 to 9 twice (out/run_a, out/run_b), compares every output
/// file byte for byte and appends criterion 10. Writes out/selftest_report.json.
SelftestReport run_selftest(const std::filesystem::path& out, const SuiteOptions& options);

/// "criterion  1 PASS  <title>: <detail>"
std::string format_line(const CriterionResult& result);

}  // namespace exec_lab::acceptance
