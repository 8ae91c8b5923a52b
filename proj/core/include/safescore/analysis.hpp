#pragma once

// Pearson correlation studies across metrics and model architectures.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace safescore {

// Pearson product-moment coefficient. Requires equal lengths of at least 3 and
// nonconstant inputs; throws DataError("zero variance") or DataError on a
// length problem otherwise.
double pcc(std::span<const double> xs, std::span<const double> ys);

struct MetricVector {
  std::string metric_name;
  std::vector<std::pair<std::string, double>> values;  // (model_id, value), ids unique
};

// Throws DataError on duplicate model ids or non-finite values.
void validate(const MetricVector& vector);

inline constexpr std::size_t kMinCorrelationOverlap = 3;

struct CorrelationCell {
  std::optional<double> value;
  std::size_t overlap{};  // models shared by the two vectors
  std::string note;       // why value is absent
};

struct CorrelationMatrix {
  std::vector<std::string> names;  // sorted metric names; rows and columns
  std::vector<std::vector<CorrelationCell>> cells;

  const CorrelationCell& at(std::size_t row, std::size_t col) const { return cells[row][col]; }
};

// Symmetric matrix of pcc over the per-pair intersection of model ids. Pairs
// sharing fewer than 3 models, or constant over the overlap, are reported as
// not available. Independent of input order.
CorrelationMatrix metric_correlation_matrix(std::span<const MetricVector> vectors);

struct ArchSpec {
  std::string model_id;
  int attention_heads{1};
  int layers{1};
  int hidden_dim{1};
  std::optional<double> parameters_millions;
  std::string family;  // optional grouping label, empty when absent
};

void validate(const ArchSpec& spec);

struct ArchRow {
  ArchSpec arch;
  double average_safety{};
};

struct ArchCorrelation {
  double heads{};
  double layers{};
  double hidden_dim{};
};

// pcc of average safety against heads, layers and hidden size.
ArchCorrelation arch_correlation(std::span<const ArchRow> rows);

}  // namespace safescore
