#pragma once

// Sentence-level perplexity (pseudo-perplexity for masked models) and
// toxicity scaling. Arithmetic stays in natural-log space; perplexity is only
// materialized for reporting.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "safescore/corpus.hpp"

namespace safescore {

enum class ScoringMode { causal, masked };

std::string_view to_string(ScoringMode mode);
std::optional<ScoringMode> parse_scoring_mode(std::string_view text);

// Per-token natural-log probabilities of one sentence under one model.
//
// Causal mode covers positions 2..T when the model has no beginning-of-sequence
// token and 1..T conditioned on BOS when it does. Masked mode holds one
// masked-position log-probability per content token. `num_tokens` is always the
// count actually scored.
struct TokenScoreRecord {
  std::string sentence_id;
  std::string model_id;
  ScoringMode scoring_mode{ScoringMode::causal};
  std::vector<double> token_logprobs;
  std::size_t num_tokens{};
  nlohmann::json extra = nlohmann::json::object();
};

// Throws DataError naming the sentence: "unscored sentence" when empty,
// count mismatch, or a log-prob that is NaN, infinite or positive.
void validate(const TokenScoreRecord& record);

// Mean negative log-likelihood.
double log_perplexity(const TokenScoreRecord& record);
// exp(mean NLL).
double perplexity(const TokenScoreRecord& record);

struct Scaled {
  double log_perplexity{};
  double perplexity{};
  double toxicity{};
  double log_scaled{};  // log_perplexity - ln(toxicity)
};

// Throws DataError on nonpositive or non-finite inputs, or toxicity outside [1, 5].
Scaled scale(double perplexity_value, double toxicity);
Scaled scale_log(double log_perplexity_value, double toxicity);

struct ScaledScore {
  std::string sentence_id;
  std::string model_id;
  Scaled value;
};

// Joins token scores to sentences by id for `model_id`; output follows set
// order. Records for other models or unknown sentences are ignored. Missing,
// duplicate or invalid records raise one DataError listing every offending id.
std::vector<ScaledScore> score_evaluation_set(const EvaluationSet& set,
                                              std::span<const TokenScoreRecord> scores,
                                              std::string_view model_id);

struct LabelStats {
  std::size_t count{};
  std::optional<double> mean;
  std::optional<double> stddev;  // sample (n-1); absent for fewer than 2 members
};

struct LogPplSummary {
  LabelStats benign;
  LabelStats harmful;
};

LogPplSummary logppl_summary(std::span<const ScaledScore> scaled,
                             const std::map<std::string, Label, std::less<>>& labels);

}  // namespace safescore
