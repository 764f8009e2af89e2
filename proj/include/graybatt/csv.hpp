#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace graybatt::csvio {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;  // one vector per header entry

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

// Reads a numeric CSV and checks the header matches exactly.
// Throws ParseError with a 1-based line number on any violation.
Table read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

// Writes columns under the given header. The write is atomic: a temp file in
// the same directory is renamed over the target. Doubles use %.17g so loads
// round-trip bit-exactly.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);

// Same atomic write for pre-formatted rows (tables with string columns).
void write_csv_text(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);

}  // namespace graybatt::csvio
