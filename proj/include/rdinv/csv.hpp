#pragma once

#include <string>
#include <vector>

namespace rdinv {

/// Locale-independent formatting with 17 significant digits ('.' decimal).
std::string csv_cell(double v);

/// Writes a header row plus numeric columns (all of equal length).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);

}  // namespace rdinv
