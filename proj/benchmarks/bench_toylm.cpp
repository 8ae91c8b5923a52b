#include <benchmark/benchmark.h>

#include "demo.hpp"
#include "safescore/toylm.hpp"

namespace {

using safescore::toylm::NgramModel;

void BM_TrainBigram(benchmark::State& state) {
  const auto corpus = safescore::demo::training_corpus();
  for (auto _ : state) {
    auto model = NgramModel::train(corpus, {2, 0.1, safescore::toylm::Tokenizer::whitespace});
    benchmark::DoNotOptimize(model);
  }
}

void BM_ScoreSentence(benchmark::State& state) {
  const auto corpus = safescore::demo::training_corpus();
  const auto model = NgramModel::train(
      corpus, {static_cast<int>(state.range(0)), 0.1, safescore::toylm::Tokenizer::character});
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.score_sentence("the local artists share music festivals every summer", "s", "m"));
  }
}

void BM_Demo(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(safescore::demo::run(7));
}

}  // namespace

BENCHMARK(BM_TrainBigram);
BENCHMARK(BM_ScoreSentence)->Arg(1)->Arg(3)->Arg(5);
BENCHMARK(BM_Demo)->Unit(benchmark::kMillisecond);
