#include "graybatt/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "graybatt/errors.hpp"

namespace graybatt::csvio {
namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            parts.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

Table read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open " + path.string());

    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file: " + path.string());
    ++lineno;
    const auto header = split_line(line);
    if (header != expected_header) {
        std::string want;
        for (std::size_t i = 0; i < expected_header.size(); ++i)
            want += (i ? "," : "") + expected_header[i];
        throw ParseError(path.string(), 1,
                         path.string() + ": header mismatch, expected '" + want + "' got '" + line + "'");
    }

    Table t;
    t.header = header;
    t.columns.resize(header.size());

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto parts = split_line(line);
        if (parts.size() != header.size())
            throw ParseError(path.string(), lineno,
                             path.string() + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(header.size()) + " fields, got " +
                                 std::to_string(parts.size()));
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const std::string& s = parts[i];
            double v = 0.0;
            const auto* begin = s.data();
            const auto* end = s.data() + s.size();
            auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc() || ptr != end)
                throw ParseError(path.string(), lineno,
                                 path.string() + ":" + std::to_string(lineno) +
                                     ": bad numeric field '" + s + "'");
            t.columns[i].push_back(v);
        }
    }
    return t;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns) {
    if (header.size() != columns.size())
        throw ConfigError("write_csv: header/column count mismatch");
    const std::size_t n = columns.empty() ? 0 : columns.front()->size();
    for (const auto* c : columns)
        if (c->size() != n) throw ConfigError("write_csv: ragged columns");

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ParseError(tmp.string(), 0, "cannot open for write: " + tmp.string());
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << "\n";
        std::string row;
        for (std::size_t r = 0; r < n; ++r) {
            row.clear();
            for (std::size_t c = 0; c < columns.size(); ++c) {
                if (c) row += ',';
                row += format_double((*columns[c])[r]);
            }
            row += '\n';
            out << row;
        }
        if (!out) throw ParseError(tmp.string(), 0, "write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_csv_text(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    for (const auto& r : rows)
        if (r.size() != header.size()) throw ConfigError("write_csv_text: ragged rows");

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ParseError(tmp.string(), 0, "cannot open for write: " + tmp.string());
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << "\n";
        }
        if (!out) throw ParseError(tmp.string(), 0, "write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace graybatt::csvio
