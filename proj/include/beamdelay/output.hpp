// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Tidy long-format result tables (CSV and a JSON mirror with the same fields).

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace beamdelay {

/// Column-ordered table; every cell is text, integer or real.
class Table {
public:
    using Cell = std::variant<std::string, long long, double>;

    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns_.size()) throw std::invalid_argument("Table: row width mismatch");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
        os << '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << '\n';
        }
    }

    void write_json(std::ostream& os) const {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const auto& row : rows_) {
            nlohmann::ordered_json obj;
            for (std::size_t i = 0; i < row.size(); ++i)
                std::visit([&](const auto& v) { obj[columns_[i]] = v; }, row[i]);
            out.push_back(std::move(obj));
        }
        os << out.dump(2) << '\n';
    }

    static std::string format_real(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

private:
    static std::string csv_cell(const Cell& c) {
        if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
        if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
        const auto& s = std::get<std::string>(c);
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + '"';
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// The outage result schema shared by analytic, simulate and sweep.
inline Table outage_table() {
    return Table({"axis", "value", "scheme", "evaluator", "p_out", "std_err", "flags"});
}

inline std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (const auto& f : flags) {
        if (!out.empty()) out += '|';
        out += f;
    }
    return out;
}

}  // namespace beamdelay
