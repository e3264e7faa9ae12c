// RFC-4180 CSV output with a stable number format, for reproducible artifacts.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sofic {

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& cells);

    static std::string quote(const std::string& cell);
    static std::string num(double v);
    static std::string num(std::int64_t v);
    static std::string num(std::uint64_t v);

private:
    std::ostream& out_;
};

} // namespace sofic
