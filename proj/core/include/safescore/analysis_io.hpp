#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "safescore/analysis.hpp"

namespace safescore {

// CSV with header `metric_name,model_id,value`; rows sharing a metric name
// form one vector. Vectors come back sorted by name.
std::vector<MetricVector> read_metric_vectors(std::istream& in);

// CSV with header `model_id,attention_heads,layers,hidden_dim,parameters_millions`
// and an optional trailing `family` column. Empty parameters cell means unknown.
std::vector<ArchSpec> read_arch_specs(std::istream& in);

// Per-model average safety from a CSV with `model_id` and an `average` (or
// `average_safety`) column. Cells reading "n/a" are skipped.
std::map<std::string, double, std::less<>> read_average_safety(std::istream& in);

}  // namespace safescore
