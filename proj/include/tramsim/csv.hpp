#pragma once

// Minimal CSV plumbing shared by the file formats: number formatting, field
// splitting and strict numeric parsing with line-numbered errors.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tramsim/error.hpp"

namespace tramsim::csv {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

/// Parses a whole field as a finite double.
inline bool try_parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc{} && res.ptr == field.data() + field.size() && std::isfinite(out);
}

inline double parse_double(std::string_view field, const std::string& source, std::size_t line,
                           std::string_view what) {
  double value = 0.0;
  if (!try_parse_double(field, value)) {
    throw ParseError(source, line,
                     "invalid " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

inline int parse_int(std::string_view field, const std::string& source, std::size_t line,
                     std::string_view what) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  int value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ParseError(source, line,
                     "invalid " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

/// Iterates over data rows, skipping blank lines, `#` comments and an optional
/// header whose first field is not numeric. Calls `fn(fields, line_number)`.
template <typename Fn>
void for_each_row(std::istream& in, std::string_view header_first_field, Fn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (!seen_data && fields.front() == header_first_field) {
      seen_data = true;
      continue;
    }
    seen_data = true;
    fn(fields, line_no);
  }
}

/// Writes one row of numbers joined by commas.
inline void write_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_number(v);
    first = false;
  }
  out << '\n';
}

}  // namespace tramsim::csv
