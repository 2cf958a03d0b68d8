#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nvw {

/// Shortest decimal text that reads back to the same double.
std::string fmt_double(double v);

/// Writes one CSV row of doubles.
void write_csv_row(std::ostream& os, const std::vector<double>& values);

}  // namespace nvw
