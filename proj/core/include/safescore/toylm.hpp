#pragma once

// Add-k smoothed n-gram language model over characters or whitespace tokens.
// Deterministic stand-in for a neural model when exercising the pipeline.

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "safescore/scoring.hpp"

namespace safescore::toylm {

enum class Tokenizer { character, whitespace };

inline constexpr std::string_view kBegin = "<s>";
inline constexpr std::string_view kEnd = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";

// Splits on UTF-8 code points or on runs of ASCII whitespace.
std::vector<std::string> tokenize(std::string_view text, Tokenizer tokenizer);

struct TrainOptions {
  int order{2};
  double smoothing_k{1.0};
  Tokenizer tokenizer{Tokenizer::whitespace};
};

class NgramModel {
 public:
  using TokenId = std::uint32_t;
  using Context = std::vector<TokenId>;

  // Throws DataError on an empty corpus, order < 1 or k <= 0.
  static NgramModel train(std::span<const std::string> corpus, const TrainOptions& options);

  int order() const { return order_; }
  double smoothing_k() const { return smoothing_k_; }
  Tokenizer tokenizer() const { return tokenizer_; }

  // Sorted; includes the begin, end and unknown markers.
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  TokenId id_of(std::string_view token) const;  // unknown tokens map to <unk>

  // (count(context, token) + k) / (count(context) + k |V|). `context` holds
  // exactly order - 1 ids.
  double probability(std::span<const TokenId> context, TokenId token) const;
  double log_probability(std::span<const TokenId> context, TokenId token) const;

  // Contexts observed in training, in sorted order.
  std::vector<Context> observed_contexts() const;

  struct ScoreOptions {
    bool score_end_marker{true};
  };

  // Causal-mode scores for every token of `text` (plus </s> by default), each
  // conditioned on the previous order - 1 tokens padded with <s>. Throws
  // DataError on text without tokens.
  TokenScoreRecord score_sentence(std::string_view text, std::string sentence_id,
                                  std::string model_id) const;
  TokenScoreRecord score_sentence(std::string_view text, std::string sentence_id,
                                  std::string model_id, const ScoreOptions& options) const;

  // Sorted `context<TAB>token<TAB>count` lines after a `#` header. Context
  // tokens are space separated; backslash, space, tab and newline inside
  // tokens are escaped as \\, \s, \t, \n.
  void dump(std::ostream& out) const;

 private:
  struct ContextCounts {
    std::uint64_t total{};
    std::map<TokenId, std::uint64_t> next;
  };

  int order_{1};
  double smoothing_k_{1.0};
  Tokenizer tokenizer_{Tokenizer::whitespace};
  std::vector<std::string> vocabulary_;
  std::map<std::string, TokenId, std::less<>> index_;
  std::map<Context, ContextCounts> counts_;
};

}  // namespace safescore::toylm
