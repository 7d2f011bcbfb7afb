#include "wigner/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wigner::io {

// 17 significant digits: enough that reading the text back reproduces the
// exact double, so CSV output round-trips.
std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string escape_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (const char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_cell(const nlohmann::json& value) {
  if (value.is_null()) return "";
  if (value.is_string()) return escape_cell(value.get<std::string>());
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
  if (value.is_number_float()) return format_double(value.get<double>());
  return escape_cell(value.dump());
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const nlohmann::json& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");

  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << escape_cell(columns[c]);
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ',';
      if (row.contains(columns[c])) out << render_cell(row.at(columns[c]));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace wigner::io
