#include "soficlab/csv.hpp"

#include <cmath>
#include <cstdio>

namespace sofic {

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << quote(cells[i]);
    }
    out_ << "\r\n";
}

std::string CsvWriter::quote(const std::string& cell) {
    bool needs = cell.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string CsvWriter::num(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string CsvWriter::num(std::int64_t v) { return std::to_string(v); }
std::string CsvWriter::num(std::uint64_t v) { return std::to_string(v); }

} // namespace sofic
