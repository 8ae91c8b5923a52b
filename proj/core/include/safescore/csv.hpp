#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace safescore {

// A parsed CSV table. Lines starting with '#' are comments and are skipped;
// the first non-comment line is the header.
class CsvTable {
 public:
  static CsvTable parse(std::istream& in);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  // 1-based source line of each row, parallel to rows().
  const std::vector<std::size_t>& lines() const { return lines_; }

  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);

double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

}  // namespace safescore
