// scan.hpp: ScanRecord rows and their CSV / JSON emission.

#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace pfwcl {

/// One row of a parameter scan: ordered (column, value) pairs.
struct ScanRecord {
    std::vector<std::pair<std::string, double>> fields;

    ScanRecord& set(const std::string& key, double value) {
        for (auto& [k, v] : fields) {
            if (k == key) {
                v = value;
                return *this;
            }
        }
        fields.emplace_back(key, value);
        return *this;
    }

    bool has(const std::string& key) const {
        for (const auto& f : fields)
            if (f.first == key) return true;
        return false;
    }

    double get(const std::string& key) const {
        for (const auto& [k, v] : fields)
            if (k == key) return v;
        throw std::out_of_range("ScanRecord: no column '" + key + "'");
    }
};

/// 17 significant digits, so a parsed value round-trips exactly.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv_header(std::ostream& os, const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
}

/// Missing columns are written as nan.
inline void write_csv_row(std::ostream& os, const ScanRecord& row, const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        os << (i ? "," : "");
        os << (row.has(columns[i]) ? format_double(row.get(columns[i])) : "nan");
    }
    os << '\n';
}

/// Non-finite values become null.
inline nlohmann::json to_json(const ScanRecord& row, const std::vector<std::string>& columns) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& c : columns) {
        if (row.has(c) && std::isfinite(row.get(c)))
            j[c] = row.get(c);
        else
            j[c] = nullptr;
    }
    return j;
}

}  // namespace pfwcl
