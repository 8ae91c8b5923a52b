#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <string_view>

#include <nlohmann/json.hpp>

namespace safescore {

inline constexpr std::string_view kSchemaVersion = "v1";
inline constexpr std::string_view kSchemaField = "schema_version";

// Calls `fn(object, line_number)` for every nonblank line of `in`. Lines that
// fail to parse as a JSON object are handed to `on_error` with the parser
// message; when `on_error` is empty a DataError is thrown instead.
void for_each_json_line(
    std::istream& in,
    const std::function<void(nlohmann::json&, std::size_t)>& fn,
    const std::function<void(std::size_t, const std::string&)>& on_error = {});

// Writes one compact object per line, stamping the schema version field.
void write_json_line(std::ostream& out, nlohmann::json object);

// Throws DataError when an object declares a schema version other than v1.
void check_schema_version(const nlohmann::json& object, std::size_t line);

}  // namespace safescore
