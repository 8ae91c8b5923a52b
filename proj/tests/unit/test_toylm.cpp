#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "safescore/toylm.hpp"

namespace safescore::toylm {
namespace {

TEST(Tokenize, Whitespace) {
  EXPECT_EQ(tokenize("  a bb\tc\n", Tokenizer::whitespace), (std::vector<std::string>{"a", "bb", "c"}));
  EXPECT_TRUE(tokenize(" \t ", Tokenizer::whitespace).empty());
}

TEST(Tokenize, CodePoints) {
  EXPECT_EQ(tokenize("aé€😀", Tokenizer::character),
            (std::vector<std::string>{"a", "é", "€", "😀"}));
}

TEST(NgramModel, SmoothedBigramProbabilities) {
  // Vocabulary: </s> <s> <unk> a b c  (|V| = 6)
  // after "a": b twice, c once -> total 3
  const std::vector<std::string> corpus{"a b", "a b", "a c"};
  const auto model = NgramModel::train(corpus, {2, 1.0, Tokenizer::whitespace});
  ASSERT_EQ(model.vocabulary().size(), 6u);
  const NgramModel::TokenId a[] = {model.id_of("a")};
  EXPECT_DOUBLE_EQ(model.probability(a, model.id_of("b")), 3.0 / 9.0);
  EXPECT_DOUBLE_EQ(model.probability(a, model.id_of("c")), 2.0 / 9.0);
  EXPECT_DOUBLE_EQ(model.probability(a, model.id_of("a")), 1.0 / 9.0);
  // "<s>" is always followed by "a"
  const NgramModel::TokenId bos[] = {model.id_of("<s>")};
  EXPECT_DOUBLE_EQ(model.probability(bos, model.id_of("a")), 4.0 / 9.0);
  // never-seen context
  const NgramModel::TokenId unk[] = {model.id_of("zzz")};
  EXPECT_EQ(unk[0], model.id_of("<unk>"));
  EXPECT_DOUBLE_EQ(model.probability(unk, model.id_of("a")), 1.0 / 6.0);
}

TEST(NgramModel, DistributionsSumToOne) {
  const std::vector<std::string> corpus{"the cat sat", "the dog sat down", "a cat ran"};
  for (int order : {1, 2, 3}) {
    for (double k : {0.01, 0.5, 2.0}) {
      const auto model = NgramModel::train(corpus, {order, k, Tokenizer::whitespace});
      auto contexts = model.observed_contexts();
      contexts.push_back(NgramModel::Context(order - 1, model.id_of("<unk>")));
      for (const auto& ctx : contexts) {
        double total = 0.0;
        for (NgramModel::TokenId t = 0; t < model.vocabulary().size(); ++t) total += model.probability(ctx, t);
        ASSERT_NEAR(total, 1.0, 1e-12) << "order " << order << " k " << k;
      }
    }
  }
}

TEST(NgramModel, ScoreSentence) {
  const std::vector<std::string> corpus{"a b", "a b", "a c"};
  const auto model = NgramModel::train(corpus, {2, 1.0, Tokenizer::whitespace});
  const auto record = model.score_sentence("a b", "s1", "toy");
  ASSERT_EQ(record.num_tokens, 3u);
  EXPECT_DOUBLE_EQ(record.token_logprobs[0], std::log(4.0 / 9.0));
  EXPECT_DOUBLE_EQ(record.token_logprobs[1], std::log(3.0 / 9.0));
  // after "b": "</s>" twice -> (2 + 1) / (2 + 6)
  EXPECT_DOUBLE_EQ(record.token_logprobs[2], std::log(3.0 / 8.0));
  EXPECT_EQ(record.sentence_id, "s1");
  EXPECT_EQ(record.model_id, "toy");
  EXPECT_NO_THROW(validate(record));

  const auto bare = model.score_sentence("a b", "s1", "toy", {false});
  EXPECT_EQ(bare.num_tokens, 2u);
  EXPECT_THROW(model.score_sentence("   ", "s2", "toy"), DataError);
}

TEST(NgramModel, UnseenTextIsLessLikely) {
  const std::vector<std::string> corpus{"people enjoy music", "people share food", "friends enjoy food"};
  const auto model = NgramModel::train(corpus, {2, 0.1, Tokenizer::whitespace});
  const auto seen = model.score_sentence("people enjoy food", "a", "m");
  const auto unseen = model.score_sentence("zork blat quux", "b", "m");
  EXPECT_LT(log_perplexity(seen), log_perplexity(unseen));
}

TEST(NgramModel, TrainErrors) {
  const std::vector<std::string> empty;
  EXPECT_THROW(NgramModel::train(empty, {}), DataError);
  const std::vector<std::string> blank{"  "};
  EXPECT_THROW(NgramModel::train(blank, {}), DataError);
  const std::vector<std::string> corpus{"a"};
  EXPECT_THROW(NgramModel::train(corpus, {0, 1.0, Tokenizer::whitespace}), DataError);
  EXPECT_THROW(NgramModel::train(corpus, {2, 0.0, Tokenizer::whitespace}), DataError);
}

TEST(NgramModel, DumpIsStable) {
  const std::vector<std::string> corpus{"ab", "a b"};
  const auto model = NgramModel::train(corpus, {2, 0.5, Tokenizer::character});
  std::ostringstream out;
  model.dump(out);
  EXPECT_EQ(out.str(),
            "# safescore toylm v1\n"
            "# order=2 smoothing_k=0.5 tokenizer=char vocabulary=6\n"
            "\\s\tb\t1\n"
            "<s>\ta\t2\n"
            "a\t\\s\t1\n"
            "a\tb\t1\n"
            "b\t</s>\t2\n");
}

}  // namespace
}  // namespace safescore::toylm
