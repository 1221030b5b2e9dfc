#pragma once

// CSV emission: UTF-8, header row, LF line endings, full decimal precision.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "qheat/qcore.hpp"

namespace qheat {

/// Shortest representation that round-trips a double (17 significant digits).
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Write a table; an empty table produces a header-only file.
inline void emit_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write CSV output file '" + path + "'");
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    if (!out) throw error("cannot write CSV output file '" + path + "'");
}

}  // namespace qheat
