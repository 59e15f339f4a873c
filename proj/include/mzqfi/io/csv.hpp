#pragma once

// Versioned CSV: a "# mzqfi-csv v1 kind=<kind>" comment line, one header row,
// then comma-separated rows. Floats use 17 significant digits so values
// round-trip exactly.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mzqfi/errors.hpp"

namespace mzqfi::io {

inline constexpr const char* kCsvMagic = "# mzqfi-csv";
inline constexpr int kCsvVersion = 1;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw SchemaError("csv: missing column '" + name + "'");
  }

  bool has_column(const std::string& name) const {
    for (const auto& c : columns)
      if (c == name) return true;
    return false;
  }

  double number(std::size_t row, std::size_t col) const {
    const std::string& s = rows.at(row).at(col);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw SchemaError("csv: row " + std::to_string(row + 1) + " column '" + columns.at(col) +
                        "' is not a number: '" + s + "'");
    }
  }
};

// Fields never contain commas or quotes (identifiers and numbers only), so no
// quoting is needed.
inline void write_csv(std::ostream& os, const CsvTable& t) {
  os << kCsvMagic << " v" << kCsvVersion << " kind=" << t.kind << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvTable read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream head(line);
  std::string magic1, magic2, version, kind;
  head >> magic1 >> magic2 >> version >> kind;
  if (magic1 + " " + magic2 != kCsvMagic) throw SchemaError("csv: missing mzqfi-csv header comment");
  if (version != "v" + std::to_string(kCsvVersion))
    throw SchemaError("csv: unsupported schema version '" + version + "'");
  if (kind.rfind("kind=", 0) != 0 || kind.size() <= 5) throw SchemaError("csv: header lacks kind=");
  CsvTable t;
  t.kind = kind.substr(5);
  if (!std::getline(is, line)) throw SchemaError("csv: missing column header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.columns = split_fields(line);
  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_fields(line);
    if (f.size() != t.columns.size())
      throw SchemaError("csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                        " fields, expected " + std::to_string(t.columns.size()));
    t.rows.push_back(std::move(f));
  }
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_csv(in);
}

}  // namespace mzqfi::io
