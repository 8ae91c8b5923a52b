#pragma once

// Report rendering. CSV output carries full round-trip precision; Markdown is
// rounded to four decimals for reading. Both start with a schema line.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "safescore/analysis.hpp"
#include "safescore/rankstat.hpp"
#include "safescore/scoring.hpp"

namespace safescore {

enum class TableFormat { csv, markdown };

// One row per model, one column per group (union over all reports, sorted),
// then the average. Excluded or missing groups read "n/a".
void render_safety_table(std::ostream& out, std::span<const SafetyReport> reports,
                         TableFormat format);

// Newline-delimited `model_id, group, u, n, m, safety` records; excluded
// groups carry null u/safety and an `excluded` reason.
void write_safety_records(std::ostream& out, std::span<const SafetyReport> reports);

struct ModelLogPpl {
  std::string model_id;
  LogPplSummary summary;
};

// Benign and harmful log-perplexity, mean and sample standard deviation.
void render_logppl_table(std::ostream& out, std::span<const ModelLogPpl> rows,
                         TableFormat format);
void write_logppl_records(std::ostream& out, std::span<const ModelLogPpl> rows);

void render_correlation_matrix(std::ostream& out, const CorrelationMatrix& matrix,
                               TableFormat format);
void write_correlation_records(std::ostream& out, const CorrelationMatrix& matrix);

struct FamilyCorrelation {
  std::string family;
  ArchCorrelation pcc;
};

// One row per family: heads, layers, hidden size.
void render_arch_table(std::ostream& out, std::span<const FamilyCorrelation> rows,
                       TableFormat format);
void write_arch_records(std::ostream& out, std::span<const FamilyCorrelation> rows);

}  // namespace safescore
