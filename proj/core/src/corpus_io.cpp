#include "safescore/corpus_io.hpp"

#include <fmt/format.h>

#include "safescore/ndjson.hpp"

namespace safescore {
namespace {

using nlohmann::json;

std::string require_string(const json& object, const char* key, std::size_t line) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) {
    throw DataError(fmt::format("line {}: field '{}' must be a string", line, key));
  }
  return it->get<std::string>();
}

double require_number(const json& object, const char* key, std::size_t line) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_number()) {
    throw DataError(fmt::format("line {}: field '{}' must be a number", line, key));
  }
  return it->get<double>();
}

// Everything except `known` and the schema tag.
json unknown_fields(const json& object, std::initializer_list<const char*> known) {
  json extra = json::object();
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (it.key() == kSchemaField) continue;
    bool is_known = false;
    for (const char* k : known) is_known = is_known || it.key() == k;
    if (!is_known) extra[it.key()] = it.value();
  }
  return extra;
}

RawAnnotation parse_raw(const json& o, std::size_t line) {
  RawAnnotation raw;
  raw.id = require_string(o, "id", line);
  raw.text = require_string(o, "text", line);
  if (auto it = o.find("source"); it != o.end() && it->is_string()) raw.source = *it;

  const auto& groups = o.at("annotator_target_groups");
  const auto& toxicity = o.at("annotator_toxicity");
  if (!groups.is_array() || !toxicity.is_array()) {
    throw DataError("annotator fields must be arrays");
  }
  for (const auto& g : groups) {
    if (!g.is_string()) throw DataError("annotator_target_groups entries must be strings");
    raw.annotator_target_groups.push_back(g.get<std::string>());
  }
  for (const auto& t : toxicity) {
    if (!t.is_number()) throw DataError("annotator_toxicity entries must be numbers");
    raw.annotator_toxicity.push_back(t.get<double>());
  }
  raw.extra = unknown_fields(
      o, {"id", "text", "source", "annotator_target_groups", "annotator_toxicity"});
  return raw;
}

std::string id_hint(const json& o) {
  auto it = o.find("id");
  return it != o.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

}  // namespace

RawAnnotationFile read_raw_annotations(std::istream& in) {
  RawAnnotationFile file;
  for_each_json_line(
      in,
      [&](json& o, std::size_t line) {
        try {
          check_schema_version(o, line);
          file.records.push_back(parse_raw(o, line));
        } catch (const std::exception& e) {
          file.issues.push_back({id_hint(o), line, e.what()});
        }
      },
      [&](std::size_t line, const std::string& error) {
        file.issues.push_back({{}, line, error});
      });
  return file;
}

BinaryRecordFile read_binary_records(std::istream& in) {
  BinaryRecordFile file;
  for_each_json_line(
      in,
      [&](json& o, std::size_t line) {
        try {
          BinaryRecord r;
          auto id = o.find("id");
          r.id = id != o.end() && id->is_string() ? id->get<std::string>()
                                                  : fmt::format("row-{}", line);
          r.text = require_string(o, "text", line);
          r.label = require_string(o, "label", line);
          for (const char* key : {"target_group", "group"}) {
            auto g = o.find(key);
            if (g != o.end() && g->is_string()) {
              r.group = g->get<std::string>();
              break;
            }
          }
          r.extra = unknown_fields(o, {"id", "text", "label", "group", "target_group"});
          file.records.push_back(std::move(r));
        } catch (const std::exception& e) {
          file.issues.push_back({id_hint(o), line, e.what()});
        }
      },
      [&](std::size_t line, const std::string& error) {
        file.issues.push_back({{}, line, error});
      });
  return file;
}

EvaluationSet read_evaluation_set(std::istream& in, std::string provenance) {
  std::vector<SentenceRecord> records;
  for_each_json_line(in, [&](json& o, std::size_t line) {
    check_schema_version(o, line);
    SentenceRecord r;
    r.id = require_string(o, "id", line);
    r.text = require_string(o, "text", line);
    r.target_group = require_string(o, "target_group", line);
    r.toxicity = require_number(o, "toxicity", line);
    const auto label = require_string(o, "label", line);
    auto parsed = parse_label(label);
    if (!parsed) throw DataError(fmt::format("line {}: unknown label '{}'", line, label));
    r.label = *parsed;
    r.extra = unknown_fields(o, {"id", "text", "target_group", "toxicity", "label"});
    records.push_back(std::move(r));
  });
  return EvaluationSet(std::move(records), std::move(provenance));
}

void write_evaluation_set(std::ostream& out, const EvaluationSet& set) {
  for (const auto& r : set.records()) {
    json o = r.extra.is_object() ? r.extra : json::object();
    o["id"] = r.id;
    o["text"] = r.text;
    o["target_group"] = r.target_group;
    o["toxicity"] = r.toxicity;
    o["label"] = to_string(r.label);
    write_json_line(out, std::move(o));
  }
}

}  // namespace safescore
