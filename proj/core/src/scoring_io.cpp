#include "safescore/scoring_io.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "safescore/ndjson.hpp"

namespace safescore {
namespace {

using nlohmann::json;

const json& field(const json& o, const char* key, std::size_t line) {
  auto it = o.find(key);
  if (it == o.end()) throw DataError(fmt::format("line {}: missing field '{}'", line, key));
  return *it;
}

std::string string_field(const json& o, const char* key, std::size_t line) {
  const auto& v = field(o, key, line);
  if (!v.is_string()) throw DataError(fmt::format("line {}: field '{}' must be a string", line, key));
  return v.get<std::string>();
}

double number_field(const json& o, const char* key, std::size_t line) {
  const auto& v = field(o, key, line);
  if (!v.is_number()) throw DataError(fmt::format("line {}: field '{}' must be a number", line, key));
  return v.get<double>();
}

bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<TokenScoreRecord> read_token_scores(std::istream& in) {
  std::vector<TokenScoreRecord> records;
  for_each_json_line(in, [&](json& o, std::size_t line) {
    check_schema_version(o, line);
    TokenScoreRecord r;
    r.sentence_id = string_field(o, "sentence_id", line);
    r.model_id = string_field(o, "model_id", line);
    const auto mode = string_field(o, "scoring_mode", line);
    auto parsed = parse_scoring_mode(mode);
    if (!parsed) throw DataError(fmt::format("line {}: unknown scoring_mode '{}'", line, mode));
    r.scoring_mode = *parsed;

    const auto& lps = field(o, "token_logprobs", line);
    if (!lps.is_array()) throw DataError(fmt::format("line {}: token_logprobs must be an array", line));
    for (const auto& lp : lps) {
      if (!lp.is_number()) {
        throw DataError(fmt::format("line {}: token_logprobs entries must be numbers", line));
      }
      r.token_logprobs.push_back(lp.get<double>());
    }
    const auto& n = field(o, "num_tokens", line);
    if (!n.is_number_unsigned()) {
      throw DataError(fmt::format("line {}: num_tokens must be a nonnegative integer", line));
    }
    r.num_tokens = n.get<std::size_t>();

    for (auto it = o.begin(); it != o.end(); ++it) {
      const auto& k = it.key();
      if (k != "sentence_id" && k != "model_id" && k != "scoring_mode" && k != "token_logprobs" &&
          k != "num_tokens" && k != kSchemaField) {
        r.extra[k] = it.value();
      }
    }
    try {
      validate(r);
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line, e.what()));
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<ScaledScore> read_scaled_scores(std::istream& in) {
  std::vector<ScaledScore> scores;
  for_each_json_line(in, [&](json& o, std::size_t line) {
    check_schema_version(o, line);
    ScaledScore s;
    s.sentence_id = string_field(o, "sentence_id", line);
    s.model_id = string_field(o, "model_id", line);
    s.value.log_perplexity = number_field(o, "log_perplexity", line);
    s.value.perplexity = number_field(o, "perplexity", line);
    s.value.toxicity = number_field(o, "toxicity", line);
    s.value.log_scaled = number_field(o, "log_scaled", line);

    const auto& v = s.value;
    if (!(v.perplexity > 0.0) || !std::isfinite(v.perplexity) ||
        !close_relative(v.perplexity, std::exp(v.log_perplexity), 1e-12)) {
      throw DataError(fmt::format("line {}: perplexity {} inconsistent with log_perplexity {}", line,
                                  v.perplexity, v.log_perplexity));
    }
    if (!(v.toxicity >= kMinToxicity && v.toxicity <= kMaxToxicity)) {
      throw DataError(fmt::format("line {}: toxicity {} outside [1, 5]", line, v.toxicity));
    }
    if (!close_relative(v.log_scaled, v.log_perplexity - std::log(v.toxicity), 1e-12)) {
      throw DataError(fmt::format("line {}: log_scaled {} != log_perplexity - ln(toxicity)", line,
                                  v.log_scaled));
    }
    scores.push_back(std::move(s));
  });
  return scores;
}

void write_token_scores(std::ostream& out, std::span<const TokenScoreRecord> records) {
  for (const auto& r : records) {
    json o = r.extra.is_object() ? r.extra : json::object();
    o["sentence_id"] = r.sentence_id;
    o["model_id"] = r.model_id;
    o["scoring_mode"] = to_string(r.scoring_mode);
    o["token_logprobs"] = r.token_logprobs;
    o["num_tokens"] = r.num_tokens;
    write_json_line(out, std::move(o));
  }
}

void write_scaled_scores(std::ostream& out, std::span<const ScaledScore> scores) {
  for (const auto& s : scores) {
    write_json_line(out, json{{"sentence_id", s.sentence_id},
                              {"model_id", s.model_id},
                              {"log_perplexity", s.value.log_perplexity},
                              {"perplexity", s.value.perplexity},
                              {"toxicity", s.value.toxicity},
                              {"log_scaled", s.value.log_scaled}});
  }
}

}  // namespace safescore
