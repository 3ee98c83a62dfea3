// ============================================================================
// table.hpp -- schema-stable result tables and their CSV encoding
// ============================================================================
#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wsncov {

/// Empty cell, real, integer or text.
using Cell = std::variant<std::monostate, double, long long, std::string>;

/// Scientific notation with 13 significant digits; "inf"/"-inf"/"nan" otherwise.
inline std::string format_real(double v, int significant_digits = 13) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", significant_digits - 1, v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match table header");
    rows.push_back(std::move(row));
  }

  [[nodiscard]] std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::out_of_range("no column named " + name);
  }

  [[nodiscard]] double real(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    throw std::bad_variant_access();
  }
};

/// RFC 4180 field quoting.
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_cell(const Cell& c, int significant_digits = 13) {
  struct {
    int digits;
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double d) const { return format_real(d, digits); }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return s; }
  } visitor{significant_digits};
  return std::visit(visitor, c);
}

/// RFC 4180 uses CRLF; terminal output passes "\n".
inline void write_csv(std::ostream& os, const Table& t, int significant_digits = 13, const char* line_end = "\r\n") {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_escape(t.columns[i]);
  os << line_end;
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(format_cell(row[i], significant_digits));
    os << line_end;
  }
}

inline std::string to_csv(const Table& t, int significant_digits = 13, const char* line_end = "\r\n") {
  std::ostringstream os;
  write_csv(os, t, significant_digits, line_end);
  return os.str();
}

}  // namespace wsncov
