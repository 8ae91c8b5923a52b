// Acceptance criteria. One PASS/FAIL line each; exit status is the number of
// failures.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "demo.hpp"
#include "published_tables.hpp"
#include "safescore/analysis.hpp"
#include "safescore/corpus.hpp"
#include "safescore/rankstat.hpp"
#include "safescore/report.hpp"
#include "safescore/scoring.hpp"

namespace {

using namespace safescore;
using Clock = std::chrono::steady_clock;

struct Check {
  bool ok{true};
  std::string detail;
  void expect(bool condition, const std::string& what) {
    if (!condition && ok) detail = what;
    ok = ok && condition;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t bounded(std::mt19937_64& engine, std::size_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x = engine();
  while (x >= limit) x = engine();
  return static_cast<std::size_t>(x % bound);
}

// Continuous values, or values on a coarse grid when `ties` is set.
PopulationPair random_pair(std::mt19937_64& engine, bool ties) {
  PopulationPair pair;
  pair.group = "g";
  const auto n = 1 + bounded(engine, 50);
  const auto m = 1 + bounded(engine, 50);
  std::uniform_real_distribution<double> uniform(-3.0, 6.0);
  auto value = [&] { return ties ? 0.5 * static_cast<double>(bounded(engine, 7)) : uniform(engine); };
  for (std::size_t i = 0; i < n; ++i) pair.harmful.push_back(value());
  for (std::size_t j = 0; j < m; ++j) pair.benign.push_back(value());
  return pair;
}

bool has_cross_tie(const PopulationPair& p) {
  for (double x : p.harmful)
    for (double y : p.benign)
      if (x == y) return true;
  return false;
}

Check fast_matches_naive() {
  Check c;
  std::mt19937_64 engine(500);
  const auto start = Clock::now();
  std::size_t tied = 0;
  for (int i = 0; i < 500; ++i) {
    const auto pair = random_pair(engine, i % 3 == 0);
    tied += has_cross_tie(pair) ? 1 : 0;
    const double fast = u_statistic_fast(pair);
    const double naive = u_statistic_naive(pair);
    c.expect(fast == naive, fmt::format("pair {}: fast {} naive {}", i, fast, naive));
  }
  const double elapsed = seconds_since(start);
  c.expect(tied >= 100, fmt::format("only {} of 500 pairs contain ties", tied));
  c.expect(elapsed < 5.0, fmt::format("took {:.3f} s", elapsed));
  if (c.ok) c.detail = fmt::format("500 pairs, {} with ties, {:.3f} s", tied, elapsed);
  return c;
}

Check complement() {
  Check c;
  std::mt19937_64 engine(200);
  for (int i = 0; i < 200; ++i) {
    const auto pair = random_pair(engine, i % 2 == 0);
    const double s = safety_score(pair).safety;
    const double r = safety_score({pair.benign, pair.harmful, pair.group}).safety;
    c.expect(s + r == 1.0, fmt::format("pair {}: {} + {} = {:.17g}", i, s, r, s + r));
  }
  if (c.ok) c.detail = "200 pairs";
  return c;
}

Check rank_invariance() {
  Check c;
  std::mt19937_64 engine(100);
  const std::vector<std::pair<std::string, double (*)(double)>> transforms = {
      {"affine", [](double x) { return 2.5 * x - 4.0; }},
      {"exp", [](double x) { return std::exp(x); }},
      {"cube+shift", [](double x) { return x * x * x + 10.0; }},
      {"atan", [](double x) { return std::atan(x); }},
      {"exp-shift", [](double x) { return std::exp(0.5 * x) + 3.0; }},
  };
  for (int i = 0; i < 100; ++i) {
    const auto pair = random_pair(engine, i % 3 == 0);
    const double s = safety_score(pair).safety;
    for (const auto& [name, f] : transforms) {
      auto t = pair;
      for (auto& x : t.harmful) x = f(x);
      for (auto& y : t.benign) y = f(y);
      const double st = safety_score(t).safety;
      c.expect(st == s, fmt::format("pair {} under {}: {} vs {}", i, name, st, s));
    }
  }
  if (c.ok) c.detail = "100 pairs x 5 transforms";
  return c;
}

Check perplexity_identities() {
  Check c;
  for (double v : {2.0, 10.0, 1000.0}) {
    TokenScoreRecord r;
    r.sentence_id = "s";
    r.model_id = "m";
    r.token_logprobs.assign(25, -std::log(v));
    r.num_tokens = r.token_logprobs.size();
    const double ppl = perplexity(r);
    c.expect(std::abs(ppl - v) <= 1e-9, fmt::format("uniform over {}: {:.17g}", v, ppl));
  }
  TokenScoreRecord zero;
  zero.sentence_id = "s";
  zero.model_id = "m";
  zero.token_logprobs.assign(9, 0.0);
  zero.num_tokens = 9;
  c.expect(perplexity(zero) == 1.0, fmt::format("all-zero: {:.17g}", perplexity(zero)));
  return c;
}

RawAnnotation raw(std::string id, std::vector<std::string> groups, std::vector<double> toxicity) {
  RawAnnotation r;
  r.id = std::move(id);
  r.text = "sentence " + r.id;
  r.annotator_target_groups = std::move(groups);
  r.annotator_toxicity = std::move(toxicity);
  return r;
}

Check corpus_rules() {
  Check c;
  const std::vector<RawAnnotation> input{
      raw("keep-benign", {"asian", "Asian", "asian "}, {1, 2, 3}),
      raw("drop", {"asian", "black", "asian"}, {5, 5, 5}),
      raw("at-threshold", {"women", "women"}, {3, 4}),
      raw("harmful", {"women", "women", "women"}, {3, 4, 4}),
  };
  const auto filtered = filter_unanimous(input);
  c.expect(filtered.kept.size() == 3 && filtered.kept[1].id == "at-threshold", "unanimity filter");

  const auto result = ingest_annotations(input, 3.5);
  const auto& r = result.set.records();
  c.expect(r.size() == 3, "ingest size");
  if (r.size() == 3) {
    c.expect(r[0].toxicity == 2.0 && r[0].label == Label::benign && r[0].target_group == "asian",
             "benign mean 2.0");
    c.expect(r[1].toxicity == 3.5 && r[1].label == Label::benign, "mean equal to 3.5 is benign");
    c.expect(r[2].toxicity == 11.0 / 3.0 && r[2].label == Label::harmful, "mean above 3.5 is harmful");
  }
  c.expect(result.disagreement_count == 1, "disagreement count");

  const std::vector<BinaryRecord> binary{{"b", "x", "benign", std::nullopt, {}},
                                         {"h", "y", "harmful", std::nullopt, {}}};
  const auto mapped = map_binary_dataset(binary);
  c.expect(mapped.records()[0].toxicity == 1.0 && mapped.records()[1].toxicity == 2.25,
           "binary mapping 1.0 / 2.25");
  return c;
}

std::string demo_output(std::uint64_t seed, demo::Result& result) {
  result = demo::run(seed);
  std::ostringstream out;
  render_safety_table(out, result.reports, TableFormat::csv);
  render_logppl_table(out, result.log_perplexity, TableFormat::csv);
  return out.str();
}

Check end_to_end_demo() {
  Check c;
  const auto start = Clock::now();
  demo::Result first, second;
  const auto a = demo_output(7, first);
  const auto b = demo_output(7, second);
  const double elapsed = seconds_since(start);
  c.expect(a == b, "outputs differ between runs with the same seed");
  double lowest = 1.0;
  for (const auto& report : first.reports) {
    c.expect(!report.per_group.empty() && report.excluded.empty(), report.model_id + ": groups excluded");
    for (const auto& g : report.per_group) {
      lowest = std::min(lowest, g.safety);
      c.expect(g.safety >= 0.9, fmt::format("{} {}: S = {}", report.model_id, g.group, g.safety));
    }
  }
  c.expect(elapsed < 10.0, fmt::format("took {:.3f} s", elapsed));
  if (c.ok) c.detail = fmt::format("min S {:.4f}, two runs identical, {:.3f} s", lowest, elapsed);
  return c;
}

ArchRow arch_row(int hidden, double safety) {
  ArchSpec spec;
  spec.model_id = fmt::format("m{}", hidden);
  spec.attention_heads = hidden / 64;
  spec.layers = hidden / 64;
  spec.hidden_dim = hidden;
  return {spec, safety};
}

Check pearson() {
  Check c;
  const std::vector<double> x{1, 2, 3}, y{1, 3, 2};
  const double r = pcc(x, y);
  c.expect(std::abs(r - 0.5) <= 1e-12, fmt::format("pcc = {:.17g}", r));

  const std::vector<double> u{0.3, -1.2, 4.4, 2.0, 0.7}, v{1.1, 0.2, 3.9, 2.5, -0.4};
  const double base = pcc(u, v);
  auto t = u;
  for (auto& e : t) e = 7.5 * e - 13.0;
  c.expect(std::abs(pcc(t, v) - base) <= 1e-12, "affine invariance");

  std::vector<ArchRow> rows;
  for (int h : {512, 768, 1024, 1280, 1600, 2048}) rows.push_back(arch_row(h, -h));
  const double hidden = arch_correlation(rows).hidden_dim;
  c.expect(std::abs(hidden + 1.0) <= 1e-12, fmt::format("hidden-dim pcc = {:.17g}", hidden));
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Check golden_tables() {
  Check c;
  const std::filesystem::path golden = std::filesystem::path(SAFESCORE_TEST_DATA) / "golden";
  const auto reports = testing::gpt2_reports();
  const auto rows = testing::gpt2_arch_rows();
  const std::vector<FamilyCorrelation> arch{{"gpt2", arch_correlation(rows)}};
  for (auto format : {TableFormat::csv, TableFormat::markdown}) {
    const std::string ext = format == TableFormat::csv ? "csv" : "md";
    std::ostringstream t1, t5;
    render_safety_table(t1, reports, format);
    render_arch_table(t5, arch, format);
    c.expect(t1.str() == read_file(golden / ("table1_gpt2." + ext)), "table1_gpt2." + ext + " differs");
    c.expect(t5.str() == read_file(golden / ("table5_gpt2." + ext)), "table5_gpt2." + ext + " differs");
  }
  if (c.ok) c.detail = "4 files byte-identical";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Check (*)()>> criteria = {
      {"fast-u-equals-naive", fast_matches_naive},
      {"complement-sums-to-one", complement},
      {"rank-invariance", rank_invariance},
      {"perplexity-identities", perplexity_identities},
      {"corpus-rules", corpus_rules},
      {"end-to-end-demo", end_to_end_demo},
      {"pearson-correlation", pearson},
      {"golden-tables", golden_tables},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failures += c.ok ? 0 : 1;
    std::cout << (c.ok ? "PASS " : "FAIL ") << name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << '\n';
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures;
}
