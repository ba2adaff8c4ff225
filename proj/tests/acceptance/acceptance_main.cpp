#include "exec_lab/acceptance.hpp"

#include <iostream>

// Prints one PASS/FAIL line per criterion; exit status is 0 only if all pass.
int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
  exec_lab::acceptance::SuiteOptions options;
  options.on_result = [](const exec_lab::acceptance::CriterionResult& r) {
    std::cout << exec_lab::acceptance::format_line(r) << std::endl;
  };
  const auto report = exec_lab::acceptance::run_selftest(out, options);
  std::size_t passed = 0;
  for (const auto& c : report.criteria) passed += c.passed ? 1 : 0;
  std::cout << passed << "/" << report.criteria.size() << " criteria passed\n";
  return report.passed ? 0 : 1;
}
