#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curvflow/flow.hpp"

namespace curvflow::cli {

/// Shortest decimal form that round-trips, independent of locale.
std::string format_number(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Comma-separated table with a header row; cells are pre-formatted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// One text header line describing the layout, then every stored node's
/// values as little-endian 64-bit floats (node-major, halo included).
std::string encode_snapshot(const FlowState& s);

}  // namespace curvflow::cli
