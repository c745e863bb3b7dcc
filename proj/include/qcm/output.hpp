// output.hpp
// Numeric tables and their CSV form; files are written to a temporary name
// and renamed so a failed run never leaves a partial file behind.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qcm/config_io.hpp"
#include "qcm/error.hpp"

namespace qcm {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return i;
        }
        throw DomainError("table has no column '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        const auto c = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }

    // Appends the columns of `other` (same row count), skipping its first
    // column when that is a shared key such as "step".
    void append_columns(const Table& other, bool skip_key = true) {
        if (columns.empty()) {
            *this = other;
            return;
        }
        if (other.rows.size() != rows.size()) throw DimensionError("tables have different row counts");
        const std::size_t first = skip_key ? 1 : 0;
        columns.insert(columns.end(), other.columns.begin() + first, other.columns.end());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            rows[r].insert(rows[r].end(), other.rows[r].begin() + first, other.rows[r].end());
        }
    }

    std::string to_csv() const {
        std::string out;
        for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
        out += "\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
            out += "\n";
        }
        return out;
    }
};

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw Error("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace qcm
