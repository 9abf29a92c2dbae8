#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace casq {

// Shortest decimal representation that parses back to the same double;
// divergent values are spelled "inf" (never raw non-finite tokens like nan).
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct CsvTable {
    std::vector<std::string> comments;       // emitted first, each prefixed '# '
    std::vector<std::string> header;         // column names
    std::vector<std::vector<double>> rows;   // rectangular
    std::vector<std::string> footers;        // trailing comment lines
};

inline std::string to_csv_string(const CsvTable& t) {
    std::string out;
    for (const auto& c : t.comments) {
        out += "# ";
        out += c;
        out += '\n';
    }
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) out += ',';
        out += t.header[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    for (const auto& f : t.footers) {
        out += "# ";
        out += f;
        out += '\n';
    }
    return out;
}

inline void emit_csv(const CsvTable& t, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary); // LF line endings on every platform
    if (!os) throw std::runtime_error("cannot open output file: " + path.string());
    os << to_csv_string(t);
    if (!os) throw std::runtime_error("failed writing output file: " + path.string());
}

} // namespace casq
