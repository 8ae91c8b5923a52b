#include "safescore/ndjson.hpp"

#include <string>

#include <fmt/format.h>

#include "safescore/error.hpp"

namespace safescore {

std::string describe(const Issue& issue) {
  std::string out;
  if (issue.line != 0) out += fmt::format("line {}: ", issue.line);
  if (!issue.id.empty()) out += fmt::format("record '{}': ", issue.id);
  out += issue.reason;
  return out;
}

void for_each_json_line(std::istream& in,
                        const std::function<void(nlohmann::json&, std::size_t)>& fn,
                        const std::function<void(std::size_t, const std::string&)>& on_error) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json object;
    std::string error;
    try {
      object = nlohmann::json::parse(line);
      if (!object.is_object()) error = "expected a JSON object";
    } catch (const nlohmann::json::parse_error& e) {
      error = e.what();
    }
    if (!error.empty()) {
      if (!on_error) throw DataError(fmt::format("line {}: {}", line_no, error));
      on_error(line_no, error);
      continue;
    }
    fn(object, line_no);
  }
}

void write_json_line(std::ostream& out, nlohmann::json object) {
  object[std::string(kSchemaField)] = std::string(kSchemaVersion);
  out << object.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) << '\n';
}

void check_schema_version(const nlohmann::json& object, std::size_t line) {
  auto it = object.find(std::string(kSchemaField));
  if (it == object.end()) return;
  if (!it->is_string() || it->get<std::string>() != kSchemaVersion) {
    throw DataError(fmt::format("line {}: unsupported {} {}", line, kSchemaField, it->dump()));
  }
}

}  // namespace safescore
