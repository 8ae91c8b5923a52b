#pragma once

// Evaluation-set construction: unanimity filtering of annotated sentences,
// toxicity aggregation and labeling, binary-label dataset mapping and
// label-balanced downsampling.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "safescore/error.hpp"

namespace safescore {

enum class Label { benign, harmful };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

inline constexpr double kMinToxicity = 1.0;
inline constexpr double kMaxToxicity = 5.0;

// Midpoint between the benign band (1, 2, 3) and the harmful band (4, 5).
inline constexpr double kDefaultHarmThreshold = 3.5;

// Toxicity assigned to binary-labeled datasets: the linear mapping of the
// average annotated toxicity of each band onto the 1..5 scale.
inline constexpr double kBinaryBenignToxicity = 1.0;
inline constexpr double kBinaryHarmfulToxicity = 2.25;

inline constexpr std::string_view kUngroupedTarget = "all";

struct RawAnnotation {
  std::string id;
  std::string text;
  std::vector<std::string> annotator_target_groups;  // one per annotator
  std::vector<double> annotator_toxicity;            // one per annotator, in [1, 5]
  std::string source;
  nlohmann::json extra = nlohmann::json::object();   // unknown fields, passed through
};

struct SentenceRecord {
  std::string id;
  std::string text;
  std::string target_group;
  double toxicity{kMinToxicity};
  Label label{Label::benign};
  nlohmann::json extra = nlohmann::json::object();
};

class EvaluationSet {
 public:
  EvaluationSet() = default;

  // Throws DataError on duplicate ids or out-of-range toxicity.
  EvaluationSet(std::vector<SentenceRecord> records, std::string provenance);

  const std::vector<SentenceRecord>& records() const { return records_; }
  const std::set<std::string>& demographics() const { return demographics_; }
  const std::string& provenance() const { return provenance_; }

  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<SentenceRecord> records_;
  std::set<std::string> demographics_;
  std::string provenance_;
};

// Trim ASCII whitespace and lowercase.
std::string canonical_group(std::string_view group);

// Returns the reason a record violates the RawAnnotation invariants, if any.
std::optional<std::string> malformed_reason(const RawAnnotation& raw);

struct FilterResult {
  std::vector<RawAnnotation> kept;
  std::vector<Issue> issues;  // malformed records that were dropped
};

// Keeps records whose annotators all name the same target group after
// canonicalization. Order is preserved. Disagreement is not an issue; it is
// the filter doing its job.
FilterResult filter_unanimous(std::span<const RawAnnotation> raw);

// Toxicity is the arithmetic mean of annotator scores; harmful iff the mean
// exceeds `harm_threshold`. Throws DataError if `raw` is malformed or not
// unanimous.
SentenceRecord aggregate_and_label(const RawAnnotation& raw,
                                   double harm_threshold = kDefaultHarmThreshold);

struct IngestResult {
  EvaluationSet set;
  std::size_t input_count{};
  std::size_t disagreement_count{};
  std::vector<Issue> issues;
};

// filter_unanimous + aggregate_and_label; later duplicates of an id are
// dropped as issues.
IngestResult ingest_annotations(std::span<const RawAnnotation> raw,
                                double harm_threshold = kDefaultHarmThreshold,
                                std::string provenance = "annotated");

// One row of a dataset that only carries a harmful/benign label.
struct BinaryRecord {
  std::string id;
  std::string text;
  std::string label;  // "harmful" or "benign" (case-insensitive)
  std::optional<std::string> group;
  nlohmann::json extra = nlohmann::json::object();
};

// Benign rows get toxicity 1.0, harmful rows 2.25, missing group becomes
// "all". Throws DataError naming the record on an unknown label.
EvaluationSet map_binary_dataset(std::span<const BinaryRecord> records,
                                 std::string provenance = "binary");

struct DownsampleResult {
  EvaluationSet set;
  std::vector<std::string> warnings;
};

// Per group, uniformly subsamples the more numerous label down to the count
// of the other one. Sampling is seeded and independent of input order (records
// are sorted by id before sampling); the surviving records keep input order.
// Groups lacking one label entirely are dropped with a warning.
DownsampleResult downsample_balanced(const EvaluationSet& set, std::uint64_t seed);

}  // namespace safescore
