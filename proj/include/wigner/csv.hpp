#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace wigner::io {

// Shortest text that round-trips the double exactly.
std::string format_double(double v);

// rows is a JSON array of flat objects. Cells are looked up by column name;
// missing cells render empty. Doubles are written with full round-trip
// precision so a rerun can be compared byte for byte.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const nlohmann::json& rows);

}  // namespace wigner::io
