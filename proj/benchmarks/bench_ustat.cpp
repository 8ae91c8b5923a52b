#include <random>

#include <benchmark/benchmark.h>

#include "safescore/rankstat.hpp"

namespace {

safescore::PopulationPair make_pair(std::size_t n, std::size_t m, bool ties) {
  std::mt19937_64 engine(n * 31 + m);
  std::normal_distribution<double> normal;
  safescore::PopulationPair pair;
  auto value = [&] { return ties ? std::round(normal(engine) * 4.0) / 4.0 : normal(engine); };
  for (std::size_t i = 0; i < n; ++i) pair.harmful.push_back(value() + 0.3);
  for (std::size_t j = 0; j < m; ++j) pair.benign.push_back(value());
  return pair;
}

void BM_UNaive(benchmark::State& state) {
  const auto pair = make_pair(state.range(0), state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(safescore::u_statistic_naive(pair));
  state.SetComplexityN(state.range(0));
}

void BM_UFast(benchmark::State& state) {
  const auto pair = make_pair(state.range(0), state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(safescore::u_statistic_fast(pair));
  state.SetComplexityN(state.range(0));
}

void BM_UFastTolerance(benchmark::State& state) {
  const auto pair = make_pair(state.range(0), state.range(0), false);
  for (auto _ : state) benchmark::DoNotOptimize(safescore::u_statistic_fast(pair, 0.05));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_UNaive)->ArgsProduct({{64, 512, 4096}, {0, 1}})->Complexity();
BENCHMARK(BM_UFast)->ArgsProduct({{64, 512, 4096, 32768}, {0, 1}})->Complexity();
BENCHMARK(BM_UFastTolerance)->Arg(64)->Arg(512)->Arg(4096)->Arg(32768)->Complexity();
