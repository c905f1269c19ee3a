#pragma once

#include <istream>
#include <string>
#include <vector>

#include "pic/types.hpp"

namespace pic {

// Plain delimited text: no quoting or escaping (the UCI-style tables this
// tool consumes never quote). Trailing '\r' is stripped so CRLF files load.
inline std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == delim) {
      out.emplace_back(line, start, i - start);
      start = i + 1;
    }
  }
  return out;
}

struct DelimitedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line per row
};

inline DelimitedTable read_delimited(std::istream& in, char delim) {
  DelimitedTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line, delim);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(lineno);
  }
  if (table.header.empty()) throw ParseError("empty input: no header row");
  return table;
}

}  // namespace pic
