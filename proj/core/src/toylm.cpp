#include "safescore/toylm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "safescore/error.hpp"

namespace safescore::toylm {
namespace {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation or invalid byte: its own token
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string escape(std::string_view token) {
  std::string out;
  for (char c : token) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case ' ': out += "\\s"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::string_view tokenizer_name(Tokenizer t) {
  return t == Tokenizer::character ? "char" : "whitespace";
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, Tokenizer tokenizer) {
  std::vector<std::string> tokens;
  if (tokenizer == Tokenizer::character) {
    for (std::size_t i = 0; i < text.size();) {
      const auto len = std::min(utf8_length(static_cast<unsigned char>(text[i])), text.size() - i);
      tokens.emplace_back(text.substr(i, len));
      i += len;
    }
    return tokens;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const auto start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

NgramModel NgramModel::train(std::span<const std::string> corpus, const TrainOptions& options) {
  if (corpus.empty()) throw DataError("toy LM: empty training corpus");
  if (options.order < 1) throw DataError(fmt::format("toy LM: order {} must be >= 1", options.order));
  if (!(options.smoothing_k > 0.0) || !std::isfinite(options.smoothing_k)) {
    throw DataError(fmt::format("toy LM: smoothing k {} must be > 0", options.smoothing_k));
  }

  std::vector<std::vector<std::string>> sentences;
  std::set<std::string, std::less<>> vocabulary{std::string(kBegin), std::string(kEnd),
                                                 std::string(kUnknown)};
  for (const auto& line : corpus) {
    auto tokens = tokenize(line, options.tokenizer);
    if (tokens.empty()) continue;
    vocabulary.insert(tokens.begin(), tokens.end());
    sentences.push_back(std::move(tokens));
  }
  if (sentences.empty()) throw DataError("toy LM: training corpus has no tokens");

  NgramModel model;
  model.order_ = options.order;
  model.smoothing_k_ = options.smoothing_k;
  model.tokenizer_ = options.tokenizer;
  model.vocabulary_.assign(vocabulary.begin(), vocabulary.end());
  for (TokenId id = 0; id < model.vocabulary_.size(); ++id) model.index_.emplace(model.vocabulary_[id], id);

  const auto history = static_cast<std::size_t>(options.order - 1);
  const TokenId begin = model.id_of(kBegin);
  const TokenId end = model.id_of(kEnd);
  for (const auto& tokens : sentences) {
    std::vector<TokenId> seq(history, begin);
    for (const auto& t : tokens) seq.push_back(model.id_of(t));
    seq.push_back(end);
    for (std::size_t i = history; i < seq.size(); ++i) {
      Context context(seq.begin() + static_cast<std::ptrdiff_t>(i - history),
                      seq.begin() + static_cast<std::ptrdiff_t>(i));
      auto& counts = model.counts_[std::move(context)];
      ++counts.total;
      ++counts.next[seq[i]];
    }
  }
  return model;
}

NgramModel::TokenId NgramModel::id_of(std::string_view token) const {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  return index_.find(kUnknown)->second;
}

double NgramModel::probability(std::span<const TokenId> context, TokenId token) const {
  if (context.size() != static_cast<std::size_t>(order_ - 1)) {
    throw DataError(fmt::format("toy LM: context of {} tokens for an order-{} model",
                                context.size(), order_));
  }
  if (token >= vocabulary_.size()) throw DataError("toy LM: token id out of range");
  const double v = static_cast<double>(vocabulary_.size());
  auto it = counts_.find(Context(context.begin(), context.end()));
  if (it == counts_.end()) return 1.0 / v;
  const auto& counts = it->second;
  const auto next = counts.next.find(token);
  const double c = next == counts.next.end() ? 0.0 : static_cast<double>(next->second);
  return (c + smoothing_k_) / (static_cast<double>(counts.total) + smoothing_k_ * v);
}

double NgramModel::log_probability(std::span<const TokenId> context, TokenId token) const {
  return std::log(probability(context, token));
}

std::vector<NgramModel::Context> NgramModel::observed_contexts() const {
  std::vector<Context> out;
  out.reserve(counts_.size());
  for (const auto& [context, counts] : counts_) out.push_back(context);
  return out;
}

TokenScoreRecord NgramModel::score_sentence(std::string_view text, std::string sentence_id,
                                            std::string model_id) const {
  return score_sentence(text, std::move(sentence_id), std::move(model_id), ScoreOptions{});
}

TokenScoreRecord NgramModel::score_sentence(std::string_view text, std::string sentence_id,
                                            std::string model_id,
                                            const ScoreOptions& options) const {
  const auto tokens = tokenize(text, tokenizer_);
  if (tokens.empty()) throw DataError(fmt::format("sentence '{}': empty text", sentence_id));

  std::vector<TokenId> seq;
  for (const auto& t : tokens) seq.push_back(id_of(t));
  if (options.score_end_marker) seq.push_back(id_of(kEnd));

  const auto history = static_cast<std::size_t>(order_ - 1);
  std::vector<TokenId> window(history, id_of(kBegin));
  TokenScoreRecord record;
  record.sentence_id = std::move(sentence_id);
  record.model_id = std::move(model_id);
  record.scoring_mode = ScoringMode::causal;
  record.token_logprobs.reserve(seq.size());
  for (TokenId token : seq) {
    record.token_logprobs.push_back(log_probability(window, token));
    if (history > 0) {
      window.erase(window.begin());
      window.push_back(token);
    }
  }
  record.num_tokens = record.token_logprobs.size();
  return record;
}

void NgramModel::dump(std::ostream& out) const {
  out << "# safescore toylm v1\n";
  out << fmt::format("# order={} smoothing_k={} tokenizer={} vocabulary={}\n", order_, smoothing_k_,
                     tokenizer_name(tokenizer_), vocabulary_.size());
  for (const auto& [context, counts] : counts_) {
    std::string ctx;
    for (std::size_t i = 0; i < context.size(); ++i) {
      if (i) ctx += ' ';
      ctx += escape(vocabulary_[context[i]]);
    }
    for (const auto& [token, count] : counts.next) {
      out << ctx << '\t' << escape(vocabulary_[token]) << '\t' << count << '\n';
    }
  }
}

}  // namespace safescore::toylm
