#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "relunmd/core/matrix.hpp"

namespace relunmd {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empty input: a matrix needs at least one row and one column.
class CsvZeroDimensionError : public CsvError {
 public:
  using CsvError::CsvError;
};

class CsvParseError : public CsvError {
 public:
  CsvParseError(const std::string& what, std::size_t line, std::size_t column)
      : CsvError(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// 17 significant digits: parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string to_csv(const Matrix& a) {
  std::string out;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void save_csv(const Matrix& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("csv: cannot write '" + path + "'");
  out << to_csv(a);
  if (!out) throw CsvError("csv: write failed for '" + path + "'");
}

/// Parses comma-separated rows (no header). Blank trailing lines are ignored.
inline Matrix parse_csv(std::string_view text) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    Index count = 0;
    std::size_t field_start = 0;
    while (true) {
      std::size_t comma = line.find(',', field_start);
      std::string_view field =
          line.substr(field_start, comma == std::string_view::npos ? std::string_view::npos : comma - field_start);
      const std::size_t column = static_cast<std::size_t>(count) + 1;
      std::size_t lead = 0;
      while (lead < field.size() && field[lead] == ' ') ++lead;
      field.remove_prefix(lead);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw CsvParseError("csv: malformed number '" + std::string(field) + "'", line_no, column);
      if (!std::isfinite(v)) throw CsvParseError("csv: non-finite value", line_no, column);
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      field_start = comma + 1;
    }
    if (cols < 0) {
      cols = count;
    } else if (count != cols) {
      throw CsvParseError("csv: ragged row (" + std::to_string(count) + " fields, expected " +
                              std::to_string(cols) + ")",
                          line_no, static_cast<std::size_t>(std::min(count, cols)) + 1);
    }
    ++rows;
  }
  if (rows == 0) throw CsvZeroDimensionError("csv: no data rows");

  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = values[static_cast<std::size_t>(i * cols + j)];
  return out;
}

inline Matrix load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("csv: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

}  // namespace relunmd
