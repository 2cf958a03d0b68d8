#include "nvw/io.hpp"

#include <charconv>
#include <cmath>

namespace nvw {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv_row(std::ostream& os, const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) os << ',';
        os << fmt_double(values[k]);
    }
    os << '\n';
}

}  // namespace nvw
