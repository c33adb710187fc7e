#include "curvflow_cli/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "curvflow/errors.hpp"

namespace curvflow::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw ShapeError("CSV row width does not match header");
  rows_.push_back(std::move(cells));
}

namespace {

void append_cell(std::string& out, const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) {
    out += cell;
    return;
  }
  out += '"';
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    append_cell(out, row[i]);
  }
  out += "\r\n";
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  append_row(out, header_);
  for (const auto& r : rows_) append_row(out, r);
  return out;
}

std::string encode_snapshot(const FlowState& s) {
  const TensorField& f = s.is_embedding() ? s.embedding().x() : s.metric().g();
  const ChartGrid& grid = f.grid();
  std::string header = "curvflow-snapshot 1";
  header += s.is_embedding() ? " kind=embedding" : " kind=metric";
  header += " dims=" + std::to_string(grid.dim());
  auto list = [&](auto&& get) {
    std::string out;
    for (int a = 0; a < grid.dim(); ++a) {
      if (a) out += ',';
      out += std::to_string(get(a));
    }
    return out;
  };
  header += " counts=" + list([&](int a) { return grid.count(a); });
  header += " halo=" + list([&](int a) { return grid.halo(a); });
  header += " stored=" + list([&](int a) { return grid.extent(a); });
  header += " components=" + std::to_string(f.node_size());
  header += " N=" + std::to_string(f.ambient());
  if (s.is_embedding()) {
    header += " signature=";
    const auto& sig = s.embedding().signature().diag;
    for (std::size_t i = 0; i < sig.size(); ++i) {
      if (i) header += ',';
      header += sig[i] > 0 ? "+1" : "-1";
    }
  }
  header += " t=" + format_number(s.t);
  header += " layout=node-major,last-axis-fastest,f64le\n";

  std::string out = header;
  const auto& data = f.data();
  out.reserve(header.size() + data.size() * 8);
  for (double v : data) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    out.append(bytes, 8);
  }
  return out;
}

}  // namespace curvflow::cli
