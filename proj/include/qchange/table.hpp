// Copyright 2026 The qchange Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "qchange/errors.hpp"

namespace qchange {

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw DomainError("format must be csv or json, got '" + text + "'");
}

/// Column-typed result table written as CSV or JSON.
class Table {
 public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  struct Column {
    std::string name;
    bool entropy = false;  // value in nats; converted by --bits
  };

  explicit Table(std::vector<Column> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw DomainError("Table: row width does not match the header");
    rows_.push_back(std::move(row));
  }

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i].name == name) return i;
    throw DomainError("Table: no column '" + name + "'");
  }

  double number(std::size_t row, const std::string& name) const {
    const Cell& c = rows_.at(row).at(column_index(name));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    throw DomainError("Table: column '" + name + "' is not numeric");
  }

  void write(std::ostream& os, OutputFormat format, bool bits = false) const {
    if (format == OutputFormat::csv)
      write_csv(os, bits);
    else
      write_json(os, bits);
  }

 private:
  static std::string column_name(const Column& c, bool bits) {
    if (!bits || !c.entropy) return c.name;
    const std::string suffix = "_nats";
    if (c.name.size() > suffix.size() && c.name.compare(c.name.size() - suffix.size(), suffix.size(), suffix) == 0)
      return c.name.substr(0, c.name.size() - suffix.size()) + "_bits";
    return c.name;
  }

  static double convert(double v, const Column& c, bool bits) {
    return bits && c.entropy ? v / std::numbers::ln2 : v;
  }

  static std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
  }

  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  }

  void write_csv(std::ostream& os, bool bits) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << quote(column_name(columns_[i], bits));
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>)
                os << format_number(convert(v, columns_[i], bits));
              else if constexpr (std::is_same_v<T, std::int64_t>)
                os << v;
              else
                os << quote(v);
            },
            row[i]);
      }
      os << '\n';
    }
  }

  void write_json(std::ostream& os, bool bits) const {
    nlohmann::ordered_json out;
    out["units"] = bits ? "bits" : "nats";
    out["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) {
        const std::string key = column_name(columns_[i], bits);
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                const double x = convert(v, columns_[i], bits);
                if (std::isfinite(x))
                  obj[key] = x;
                else
                  obj[key] = format_number(x);
              } else {
                obj[key] = v;
              }
            },
            row[i]);
      }
      out["rows"].push_back(obj);
    }
    os << out.dump(2) << '\n';
  }

  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace qchange
