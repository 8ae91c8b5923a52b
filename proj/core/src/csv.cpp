#include "safescore/csv.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "safescore/error.hpp"

namespace safescore {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// RFC 4180 fields within one line: quoted fields may contain commas and
// doubled quotes; embedded line breaks are not supported.
std::vector<std::string> split_fields(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') {
        field += c;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = true;
      was_quoted = true;
    } else {
      field += c;
    }
  }
  if (quoted) throw DataError(fmt::format("line {}: unterminated quoted CSV field", line_no));
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

}  // namespace

CsvTable CsvTable::parse(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    auto fields = split_fields(line, line_no);
    if (!have_header) {
      table.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size()) {
      throw DataError(fmt::format("line {}: expected {} fields, found {}", line_no,
                                  table.header_.size(), fields.size()));
    }
    table.rows_.push_back(std::move(fields));
    table.lines_.push_back(line_no);
  }
  if (!have_header) throw DataError("CSV input has no header line");
  return table;
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::require_column(std::string_view name) const {
  if (auto index = column(name)) return *index;
  throw DataError(fmt::format("CSV header lacks required column '{}'", name));
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw DataError(fmt::format("{}: '{}' is not a finite number", what, text));
  }
  return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
  text = trim(text);
  long long value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(fmt::format("{}: '{}' is not an integer", what, text));
  }
  return value;
}

}  // namespace safescore
