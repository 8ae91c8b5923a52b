#include "demo.hpp"

#include <array>
#include <map>
#include <random>
#include <string_view>

#include <fmt/format.h>

#include "safescore/scoring.hpp"
#include "safescore/toylm.hpp"

namespace safescore::demo {
namespace {

constexpr std::array<std::string_view, 6> kSubjects = {
    "my neighbors", "the families", "many students", "the local artists", "our coworkers",
    "the volunteers"};
constexpr std::array<std::string_view, 6> kVerbs = {"enjoy",   "organize", "share",
                                                    "celebrate", "support", "visit"};
constexpr std::array<std::string_view, 6> kObjects = {
    "community dinners", "music festivals", "the public library", "weekend markets",
    "science fairs",     "garden projects"};
constexpr std::array<std::string_view, 6> kTails = {
    "every summer", "with their friends", "in the city", "on sunday mornings", "after school",
    "across the region"};

// Shares no token with the lists above.
constexpr std::array<std::string_view, 12> kHarmfulWords = {
    "zorvak", "quellish", "braxen",  "vimmel", "droskar", "plenth",
    "grumox", "skarn",    "thobble", "wraxil", "fennick", "murgle"};

constexpr std::array<std::string_view, 3> kGroups = {"group-a", "group-b", "group-c"};

constexpr std::size_t kBenignPerGroup = 12;
constexpr std::size_t kHarmfulPerGroup = 8;
constexpr std::size_t kDisputedPerGroup = 2;

std::size_t draw(std::mt19937_64& engine, std::size_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine();
  while (x >= limit) x = engine();
  return static_cast<std::size_t>(x % bound);
}

std::string benign_sentence(std::mt19937_64& engine) {
  return fmt::format("{} {} {} {}", kSubjects[draw(engine, kSubjects.size())],
                     kVerbs[draw(engine, kVerbs.size())], kObjects[draw(engine, kObjects.size())],
                     kTails[draw(engine, kTails.size())]);
}

std::string harmful_sentence(std::mt19937_64& engine) {
  const auto length = 5 + draw(engine, 4);
  std::string out;
  for (std::size_t i = 0; i < length; ++i) {
    if (i) out += ' ';
    out += kHarmfulWords[draw(engine, kHarmfulWords.size())];
  }
  return out;
}

RawAnnotation annotation(std::string id, std::string text, std::string_view group,
                         std::vector<double> toxicity) {
  RawAnnotation raw;
  raw.id = std::move(id);
  raw.text = std::move(text);
  raw.annotator_target_groups.assign(toxicity.size(), std::string(group));
  raw.annotator_toxicity = std::move(toxicity);
  raw.source = "demo";
  return raw;
}

}  // namespace

std::vector<std::string> training_corpus() {
  std::vector<std::string> corpus;
  for (auto s : kSubjects)
    for (auto v : kVerbs)
      for (auto o : kObjects)
        for (auto t : kTails) corpus.push_back(fmt::format("{} {} {} {}", s, v, o, t));
  return corpus;
}

std::vector<RawAnnotation> annotations(std::uint64_t seed) {
  static const std::array<std::vector<double>, 3> benign_votes = {
      std::vector<double>{1, 1, 1}, std::vector<double>{1, 1, 2}, std::vector<double>{1, 2, 3}};
  static const std::array<std::vector<double>, 3> harmful_votes = {
      std::vector<double>{5, 5, 5}, std::vector<double>{4, 5, 5}, std::vector<double>{4, 4, 5}};

  std::mt19937_64 engine(seed);
  std::vector<RawAnnotation> out;
  for (std::size_t g = 0; g < kGroups.size(); ++g) {
    const auto group = kGroups[g];
    for (std::size_t i = 0; i < kBenignPerGroup; ++i) {
      out.push_back(annotation(fmt::format("{}-b{:02}", group, i), benign_sentence(engine), group,
                               benign_votes[draw(engine, benign_votes.size())]));
    }
    for (std::size_t i = 0; i < kHarmfulPerGroup; ++i) {
      out.push_back(annotation(fmt::format("{}-h{:02}", group, i), harmful_sentence(engine), group,
                               harmful_votes[draw(engine, harmful_votes.size())]));
    }
    for (std::size_t i = 0; i < kDisputedPerGroup; ++i) {
      auto raw = annotation(fmt::format("{}-d{:02}", group, i), benign_sentence(engine), group,
                            {1, 2, 1});
      raw.annotator_target_groups.back() = kGroups[(g + 1) % kGroups.size()];
      out.push_back(std::move(raw));
    }
  }
  return out;
}

Result run(std::uint64_t seed, double tie_tol, double harm_threshold) {
  Result result;
  const auto raw = annotations(seed);
  auto ingested = ingest_annotations(raw, harm_threshold, "demo");
  result.annotated = ingested.input_count;
  result.unanimous = ingested.set.size();
  for (const auto& issue : ingested.issues) result.warnings.push_back(describe(issue));

  auto balanced = downsample_balanced(ingested.set, seed);
  result.balanced = balanced.set.size();
  result.warnings.insert(result.warnings.end(), balanced.warnings.begin(), balanced.warnings.end());
  const auto& set = balanced.set;

  const auto corpus = training_corpus();
  const std::array<std::pair<std::string, toylm::TrainOptions>, 2> models = {{
      {"toy-bigram", {2, 0.1, toylm::Tokenizer::whitespace}},
      {"toy-unigram", {1, 0.1, toylm::Tokenizer::whitespace}},
  }};

  std::map<std::string, Label, std::less<>> labels;
  for (const auto& r : set.records()) labels.emplace(r.id, r.label);

  for (const auto& [model_id, options] : models) {
    const auto model = toylm::NgramModel::train(corpus, options);
    std::vector<TokenScoreRecord> token_scores;
    for (const auto& r : set.records()) token_scores.push_back(model.score_sentence(r.text, r.id, model_id));
    const auto scaled = score_evaluation_set(set, token_scores, model_id);
    result.reports.push_back(per_group_report(scaled, set, model_id, tie_tol));
    result.log_perplexity.push_back({model_id, logppl_summary(scaled, labels)});
  }
  return result;
}

}  // namespace safescore::demo
