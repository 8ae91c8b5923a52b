#include "safescore/analysis_io.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "safescore/csv.hpp"
#include "safescore/error.hpp"

namespace safescore {

std::vector<MetricVector> read_metric_vectors(std::istream& in) {
  const auto table = CsvTable::parse(in);
  const auto name_col = table.require_column("metric_name");
  const auto model_col = table.require_column("model_id");
  const auto value_col = table.require_column("value");

  std::map<std::string, MetricVector> by_name;
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const auto& row = table.rows()[r];
    const auto where = fmt::format("line {}", table.lines()[r]);
    auto& vector = by_name[row[name_col]];
    vector.metric_name = row[name_col];
    vector.values.emplace_back(row[model_col], parse_double(row[value_col], where));
  }
  std::vector<MetricVector> out;
  for (auto& [name, vector] : by_name) {
    validate(vector);
    out.push_back(std::move(vector));
  }
  return out;
}

std::vector<ArchSpec> read_arch_specs(std::istream& in) {
  const auto table = CsvTable::parse(in);
  const auto model_col = table.require_column("model_id");
  const auto heads_col = table.require_column("attention_heads");
  const auto layers_col = table.require_column("layers");
  const auto hidden_col = table.require_column("hidden_dim");
  const auto params_col = table.require_column("parameters_millions");
  const auto family_col = table.column("family");

  auto dimension = [](const std::string& text, const std::string& where) {
    const auto v = parse_integer(text, where);
    if (v < 1 || v > 1'000'000'000) throw DataError(fmt::format("{}: dimension {} out of range", where, v));
    return static_cast<int>(v);
  };

  std::vector<ArchSpec> out;
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const auto& row = table.rows()[r];
    const auto where = fmt::format("line {}", table.lines()[r]);
    ArchSpec spec;
    spec.model_id = row[model_col];
    spec.attention_heads = dimension(row[heads_col], where);
    spec.layers = dimension(row[layers_col], where);
    spec.hidden_dim = dimension(row[hidden_col], where);
    if (!row[params_col].empty()) spec.parameters_millions = parse_double(row[params_col], where);
    if (family_col) spec.family = row[*family_col];
    validate(spec);
    out.push_back(std::move(spec));
  }
  return out;
}

std::map<std::string, double, std::less<>> read_average_safety(std::istream& in) {
  const auto table = CsvTable::parse(in);
  const auto model_col = table.require_column("model_id");
  auto value_col = table.column("average");
  if (!value_col) value_col = table.column("average_safety");
  if (!value_col) throw DataError("safety CSV needs an 'average' or 'average_safety' column");

  std::map<std::string, double, std::less<>> out;
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const auto& row = table.rows()[r];
    if (row[*value_col] == "n/a") continue;
    const auto where = fmt::format("line {}", table.lines()[r]);
    if (!out.emplace(row[model_col], parse_double(row[*value_col], where)).second) {
      throw DataError(fmt::format("{}: duplicate model id '{}'", where, row[model_col]));
    }
  }
  return out;
}

}  // namespace safescore
