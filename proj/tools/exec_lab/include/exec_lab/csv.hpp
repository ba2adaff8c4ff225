#pragma once

#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace exec_lab {

/// Locale-independent shortest-exact text for a double, 17 significant digits.
std::string format_double(double value);

/// Column-major table written as CSV with a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// All columns must have the same length.
  void add_column(std::span<const double> values);
  void write(const std::filesystem::path& path) const;
  [[nodiscard]] std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> columns_;
};

/// Writes text to a file, creating parent directories. Errors carry the path.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace exec_lab
