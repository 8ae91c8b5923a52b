#include "safescore/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <unordered_set>

#include <fmt/format.h>

namespace safescore {

std::string_view to_string(Label label) {
  return label == Label::harmful ? "harmful" : "benign";
}

std::optional<Label> parse_label(std::string_view text) {
  std::string lowered;
  for (char c : text) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lowered == "harmful") return Label::harmful;
  if (lowered == "benign") return Label::benign;
  return std::nullopt;
}

namespace {

bool toxicity_in_range(double t) {
  return std::isfinite(t) && t >= kMinToxicity && t <= kMaxToxicity;
}

}  // namespace

EvaluationSet::EvaluationSet(std::vector<SentenceRecord> records, std::string provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
  std::unordered_set<std::string> seen;
  for (const auto& r : records_) {
    if (!seen.insert(r.id).second) throw DataError(fmt::format("duplicate sentence id '{}'", r.id));
    if (!toxicity_in_range(r.toxicity)) {
      throw DataError(fmt::format("record '{}': toxicity {} outside [1, 5]", r.id, r.toxicity));
    }
    demographics_.insert(r.target_group);
  }
}

std::string canonical_group(std::string_view group) {
  const auto first = group.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = group.find_last_not_of(" \t\r\n\f\v");
  std::string out(group.substr(first, last - first + 1));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<std::string> malformed_reason(const RawAnnotation& raw) {
  if (raw.text.empty()) return "empty text";
  if (raw.annotator_target_groups.empty()) return "no annotator target groups";
  if (raw.annotator_toxicity.empty()) return "no annotator toxicity scores";
  if (raw.annotator_target_groups.size() != raw.annotator_toxicity.size()) {
    return fmt::format("{} target groups but {} toxicity scores",
                       raw.annotator_target_groups.size(), raw.annotator_toxicity.size());
  }
  for (const auto& g : raw.annotator_target_groups) {
    if (canonical_group(g).empty()) return "empty target group";
  }
  for (double t : raw.annotator_toxicity) {
    if (!toxicity_in_range(t)) return fmt::format("toxicity {} outside [1, 5]", t);
  }
  return std::nullopt;
}

namespace {

std::optional<std::string> unanimous_group(const RawAnnotation& raw) {
  const auto first = canonical_group(raw.annotator_target_groups.front());
  if (first.empty()) return std::nullopt;
  for (const auto& g : raw.annotator_target_groups) {
    if (canonical_group(g) != first) return std::nullopt;
  }
  return first;
}

}  // namespace

FilterResult filter_unanimous(std::span<const RawAnnotation> raw) {
  FilterResult result;
  for (const auto& record : raw) {
    if (auto reason = malformed_reason(record)) {
      result.issues.push_back({record.id, 0, *reason});
      continue;
    }
    if (unanimous_group(record)) result.kept.push_back(record);
  }
  return result;
}

SentenceRecord aggregate_and_label(const RawAnnotation& raw, double harm_threshold) {
  if (auto reason = malformed_reason(raw)) {
    throw DataError(fmt::format("record '{}': {}", raw.id, *reason));
  }
  auto group = unanimous_group(raw);
  if (!group) throw DataError(fmt::format("record '{}': annotators disagree on target group", raw.id));

  const auto& scores = raw.annotator_toxicity;
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) /
                      static_cast<double>(scores.size());

  SentenceRecord out;
  out.id = raw.id;
  out.text = raw.text;
  out.target_group = std::move(*group);
  // Rounding of the mean can leave it a hair outside [min, max] of the scores.
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  out.toxicity = std::clamp(mean, *lo, *hi);
  out.label = out.toxicity > harm_threshold ? Label::harmful : Label::benign;
  out.extra = raw.extra;
  if (!raw.source.empty()) out.extra["source"] = raw.source;
  return out;
}

IngestResult ingest_annotations(std::span<const RawAnnotation> raw, double harm_threshold,
                                std::string provenance) {
  IngestResult result;
  result.input_count = raw.size();
  auto filtered = filter_unanimous(raw);
  result.issues = std::move(filtered.issues);
  result.disagreement_count = raw.size() - filtered.kept.size() - result.issues.size();

  std::vector<SentenceRecord> records;
  std::unordered_set<std::string> seen;
  for (const auto& r : filtered.kept) {
    if (!seen.insert(r.id).second) {
      result.issues.push_back({r.id, 0, "duplicate id; later occurrence dropped"});
      continue;
    }
    records.push_back(aggregate_and_label(r, harm_threshold));
  }
  result.set = EvaluationSet(std::move(records), std::move(provenance));
  return result;
}

EvaluationSet map_binary_dataset(std::span<const BinaryRecord> records, std::string provenance) {
  std::vector<SentenceRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    auto label = parse_label(r.label);
    if (!label) {
      throw DataError(fmt::format("record '{}': unknown label '{}' (expected harmful or benign)",
                                  r.id, r.label));
    }
    SentenceRecord s;
    s.id = r.id;
    s.text = r.text;
    s.label = *label;
    s.toxicity = *label == Label::harmful ? kBinaryHarmfulToxicity : kBinaryBenignToxicity;
    s.target_group = r.group && !canonical_group(*r.group).empty() ? canonical_group(*r.group)
                                                                   : std::string(kUngroupedTarget);
    s.extra = r.extra;
    out.push_back(std::move(s));
  }
  return EvaluationSet(std::move(out), std::move(provenance));
}

namespace {

// splitmix64 finalizer; spreads (seed, group) into an engine seed.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t group_seed(std::uint64_t seed, std::string_view group) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : group) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(seed ^ mix(h));
}

// Uniform in [0, bound) from the raw engine output.
std::size_t bounded(std::mt19937_64& engine, std::size_t bound) {
  const std::uint64_t range = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw = engine();
  while (draw >= limit) draw = engine();
  return static_cast<std::size_t>(draw % range);
}

}  // namespace

DownsampleResult downsample_balanced(const EvaluationSet& set, std::uint64_t seed) {
  if (set.empty()) throw DataError("cannot downsample an empty evaluation set");

  const auto& records = set.records();
  std::map<std::string, std::vector<std::size_t>> harmful;
  std::map<std::string, std::vector<std::size_t>> benign;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& bucket = records[i].label == Label::harmful ? harmful : benign;
    bucket[records[i].target_group].push_back(i);
  }

  DownsampleResult result;
  std::vector<bool> keep(records.size(), false);
  for (const auto& group : set.demographics()) {
    auto& h = harmful[group];
    auto& b = benign[group];
    if (h.empty() || b.empty()) {
      result.warnings.push_back(fmt::format("group '{}' dropped: {} harmful, {} benign", group,
                                            h.size(), b.size()));
      continue;
    }
    auto& larger = h.size() > b.size() ? h : b;
    auto& smaller = h.size() > b.size() ? b : h;
    for (auto i : smaller) keep[i] = true;

    std::sort(larger.begin(), larger.end(),
              [&](std::size_t x, std::size_t y) { return records[x].id < records[y].id; });
    // Partial Fisher-Yates: the first smaller.size() slots become the sample.
    std::mt19937_64 engine(group_seed(seed, group));
    for (std::size_t i = 0; i < smaller.size(); ++i) {
      const auto j = i + bounded(engine, larger.size() - i);
      std::swap(larger[i], larger[j]);
      keep[larger[i]] = true;
    }
  }

  std::vector<SentenceRecord> kept;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) kept.push_back(records[i]);
  }
  result.set = EvaluationSet(std::move(kept), set.provenance());
  return result;
}

}  // namespace safescore
