#ifndef FRACFLOW_CSV_HPP
#define FRACFLOW_CSV_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fracflow {

using CsvCell = std::variant<double, long long, std::string>;
using CsvRow = std::vector<CsvCell>;

namespace detail {

inline std::string csv_format(const CsvCell& c) {
  if (std::holds_alternative<double>(c)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(c));
    return buf;
  }
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace detail

/// RFC-4180-style CSV with LF line endings, '.' decimal separator and
/// floats at 17 significant digits (printf %.17g, noted on the leading
/// comment line). Header row always present.
inline void emit_csv(const std::vector<CsvRow>& rows, const std::vector<std::string>& schema,
                     const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit_csv: cannot open " + path);
  os << "# floats: printf %.17g\n";
  for (size_t i = 0; i < schema.size(); ++i) os << (i ? "," : "") << schema[i];
  os << "\n";
  for (const auto& row : rows) {
    if (row.size() != schema.size())
      throw std::invalid_argument("emit_csv: row width does not match schema");
    for (size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << detail::csv_format(row[i]);
    os << "\n";
  }
  if (!os) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace fracflow

#endif  // FRACFLOW_CSV_HPP
