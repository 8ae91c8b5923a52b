#include "safescore/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "safescore/error.hpp"

namespace safescore {

double pcc(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw DataError(fmt::format("pcc: length mismatch ({} vs {})", xs.size(), ys.size()));
  }
  if (xs.size() < kMinCorrelationOverlap) {
    throw DataError(fmt::format("pcc: need at least {} points, got {}", kMinCorrelationOverlap,
                                xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw DataError("pcc: non-finite input");
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;

  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void validate(const MetricVector& vector) {
  std::set<std::string_view> ids;
  for (const auto& [model, value] : vector.values) {
    if (!ids.insert(model).second) {
      throw DataError(fmt::format("metric '{}': duplicate model id '{}'", vector.metric_name, model));
    }
    if (!std::isfinite(value)) {
      throw DataError(fmt::format("metric '{}': non-finite value for '{}'", vector.metric_name, model));
    }
  }
}

namespace {

CorrelationCell correlate(const MetricVector& a, const MetricVector& b) {
  std::map<std::string_view, double> left;
  for (const auto& [model, value] : a.values) left.emplace(model, value);
  std::map<std::string_view, double> right;
  for (const auto& [model, value] : b.values) right.emplace(model, value);

  // Sorted by model id on both sides.
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [model, value] : left) {
    if (auto it = right.find(model); it != right.end()) {
      xs.push_back(value);
      ys.push_back(it->second);
    }
  }

  CorrelationCell cell;
  cell.overlap = xs.size();
  if (xs.size() < kMinCorrelationOverlap) {
    cell.note = fmt::format("only {} shared models", xs.size());
    return cell;
  }
  try {
    cell.value = pcc(xs, ys);
  } catch (const DataError& e) {
    cell.note = e.what();
  }
  return cell;
}

}  // namespace

CorrelationMatrix metric_correlation_matrix(std::span<const MetricVector> vectors) {
  if (vectors.size() < 2) throw DataError("correlation matrix needs at least two metric vectors");

  std::vector<const MetricVector*> sorted;
  for (const auto& v : vectors) {
    validate(v);
    sorted.push_back(&v);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const MetricVector* a, const MetricVector* b) { return a->metric_name < b->metric_name; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->metric_name == sorted[i - 1]->metric_name) {
      throw DataError(fmt::format("duplicate metric name '{}'", sorted[i]->metric_name));
    }
  }

  CorrelationMatrix matrix;
  const auto k = sorted.size();
  matrix.cells.assign(k, std::vector<CorrelationCell>(k));
  for (std::size_t i = 0; i < k; ++i) {
    matrix.names.push_back(sorted[i]->metric_name);
    for (std::size_t j = i; j < k; ++j) {
      matrix.cells[i][j] = correlate(*sorted[i], *sorted[j]);
      matrix.cells[j][i] = matrix.cells[i][j];
    }
  }
  return matrix;
}

void validate(const ArchSpec& spec) {
  if (spec.attention_heads < 1 || spec.layers < 1 || spec.hidden_dim < 1) {
    throw DataError(fmt::format("model '{}': architecture dimensions must be >= 1", spec.model_id));
  }
  if (spec.parameters_millions && !(*spec.parameters_millions > 0.0)) {
    throw DataError(fmt::format("model '{}': parameter count must be positive", spec.model_id));
  }
}

ArchCorrelation arch_correlation(std::span<const ArchRow> rows) {
  std::vector<double> safety;
  std::vector<double> heads;
  std::vector<double> layers;
  std::vector<double> hidden;
  for (const auto& row : rows) {
    validate(row.arch);
    safety.push_back(row.average_safety);
    heads.push_back(row.arch.attention_heads);
    layers.push_back(row.arch.layers);
    hidden.push_back(row.arch.hidden_dim);
  }
  return {pcc(safety, heads), pcc(safety, layers), pcc(safety, hidden)};
}

}  // namespace safescore
