#pragma once

// Self-contained end-to-end run: synthetic annotated sentences, toy n-gram
// models trained on a benign-style corpus, and the resulting safety report.

#include <cstdint>
#include <string>
#include <vector>

#include "safescore/corpus.hpp"
#include "safescore/rankstat.hpp"
#include "safescore/report.hpp"

namespace safescore::demo {

// Benign-style training sentences; fixed, independent of any seed.
std::vector<std::string> training_corpus();

// Synthetic annotations for three groups. Harmful sentences use a vocabulary
// disjoint from the training corpus. A few records per group carry annotator
// disagreement on the target group.
std::vector<RawAnnotation> annotations(std::uint64_t seed);

struct Result {
  std::size_t annotated{};
  std::size_t unanimous{};
  std::size_t balanced{};
  std::vector<std::string> warnings;
  std::vector<SafetyReport> reports;
  std::vector<ModelLogPpl> log_perplexity;
};

Result run(std::uint64_t seed, double tie_tol = 0.0,
           double harm_threshold = kDefaultHarmThreshold);

}  // namespace safescore::demo
