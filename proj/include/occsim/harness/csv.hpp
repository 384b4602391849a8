#pragma once

// CSV output. Every file starts with "# occsim <kind> v1", then a header row.
// Numbers use shortest round-trip formatting so equal values print equally.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "occsim/core.hpp"

namespace occ::harness {

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::string_view kind, const std::vector<std::string>& columns) : os_(os) {
    os_ << "# occsim " << kind << " v1\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << '\n';
  }

  CsvWriter& cell(double v) { return raw(format_number(v)); }
  CsvWriter& cell(std::uint64_t v) { return raw(std::to_string(v)); }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& cell(std::string_view s) { return raw(std::string(s)); }
  CsvWriter& cell(const char* s) { return raw(s); }

  void end_row() {
    os_ << '\n';
    first_ = true;
  }

 private:
  CsvWriter& raw(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }

  std::ostream& os_;
  bool first_ = true;
};

/// Parsed CSV body (header comment skipped); used by tests and tools.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw InvalidArgument("no CSV column '" + std::string(name) + "'");
  }
};

inline CsvTable parse_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.columns.empty()) t.columns = split(line);
    else t.rows.push_back(split(line));
  }
  return t;
}

}  // namespace occ::harness
