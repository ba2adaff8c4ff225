#include "exec_lab/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace exec_lab {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("cannot format number");
  return {buf.data(), res.ptr};
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_column(std::span<const double> values) {
  if (columns_.size() >= header_.size()) throw std::logic_error("more columns than header names");
  if (!columns_.empty() && values.size() != columns_.front().size())
    throw std::logic_error("CSV columns differ in length");
  columns_.emplace_back(values.begin(), values.end());
}

std::string CsvTable::str() const {
  if (columns_.size() != header_.size()) throw std::logic_error("CSV table is incomplete");
  std::string out;
  for (std::size_t c = 0; c < header_.size(); ++c) {
    if (c) out += ',';
    out += header_[c];
  }
  out += '\n';
  const std::size_t rows = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns_[c][r]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace exec_lab
