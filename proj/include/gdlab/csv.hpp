#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "gdlab/error.hpp"

namespace gdlab::csv {

/// Fixed-format number so identical values always print identical bytes.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    if (fields[i].find_first_of(",\"\n") != std::string::npos) throw Error("csv field needs quoting: " + fields[i]);
    line += fields[i];
  }
  return line + '\n';
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error("csv has no column '" + name + "'");
  }
  bool has_column(const std::string& name) const {
    for (const auto& h : header)
      if (h == name) return true;
    return false;
  }
  const std::string& at(std::size_t row, const std::string& name) const { return rows[row][column(name)]; }

  std::string str() const {
    std::string out = join(header);
    for (const auto& r : rows) out += join(r);
    return out;
  }
};

/// Parses unquoted comma-separated text with a header row.
inline Table parse(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size()) throw Error("csv row has " + std::to_string(fields.size()) +
                                                        " fields, header has " + std::to_string(t.header.size()));
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) throw Error("csv is empty");
  return t;
}

}  // namespace gdlab::csv
