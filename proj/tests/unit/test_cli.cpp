#include <filesystem>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "demo.hpp"
#include "support.hpp"

namespace safescore {
namespace {

namespace fs = std::filesystem;
using testing::data_path;
using testing::expect_golden;
using testing::read_file;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "safescore");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return data_path("fixtures/" + name).string(); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("safescore-") + info->name() + "-" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, DemoIsDeterministicAndSafe) {
  const auto first = run_cli({"demo", "--seed", "7"});
  const auto second = run_cli({"demo", "--seed", "7"});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, second.out);
  expect_golden("demo_seed7.md", first.out);

  const auto result = demo::run(7);
  for (const auto& report : result.reports) {
    ASSERT_EQ(report.per_group.size(), 3u);
    for (const auto& g : report.per_group) EXPECT_GE(g.safety, 0.9) << report.model_id << " " << g.group;
  }
}

TEST_F(CliTest, DemoSeedChangesSampling) {
  const auto a = demo::annotations(1);
  const auto b = demo::annotations(2);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].text != b[i].text;
  EXPECT_TRUE(differs);
}

TEST_F(CliTest, IngestAnnotated) {
  const auto r = run_cli({"ingest", "--input", fixture("annotations.ndjson"), "--output", path("set.ndjson")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("6 annotated records, 1 without target agreement, 5 kept"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("line 6"), std::string::npos) << r.err;
  expect_golden("ingest_annotations.ndjson", read_file(path("set.ndjson")));
}

TEST_F(CliTest, IngestBalanced) {
  const auto r = run_cli({"ingest", "--input", fixture("annotations.ndjson"), "--balance", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 4);
}

TEST_F(CliTest, IngestBinary) {
  const auto r = run_cli({"ingest", "--input", fixture("binary.ndjson"), "--provenance", "implicit-hate"});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("ingest_binary.ndjson", r.out);
}

TEST_F(CliTest, ScoreThenSafety) {
  auto r = run_cli({"score", "--input", fixture("safety_set.ndjson"), "--scores",
                    fixture("safety_token_scores.ndjson"), "--output", path("scaled.ndjson")});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("safety_scaled.ndjson", read_file(path("scaled.ndjson")));

  r = run_cli({"safety", "--input", fixture("safety_set.ndjson"), "--scores", path("scaled.ndjson")});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("safety_fixture.md", r.out);

  r = run_cli({"safety", "--input", fixture("safety_set.ndjson"), "--scores", path("scaled.ndjson"),
               "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "# safescore v1 safety\n"
            "model_id,alpha,beta,average\n"
            "model-a,1,0,0.5\n"
            "model-b,0.5,1,0.75\n");

  r = run_cli({"safety", "--input", fixture("safety_set.ndjson"), "--scores", path("scaled.ndjson"),
               "--format", "ndjson", "--group-by", "none"});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("safety_pooled.ndjson", r.out);

  r = run_cli({"summarize", "--input", fixture("safety_set.ndjson"), "--scores", path("scaled.ndjson"),
               "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("summary_fixture.csv", r.out);
}

TEST_F(CliTest, TieToleranceIsApplied) {
  run_cli({"score", "--input", fixture("safety_set.ndjson"), "--scores", fixture("safety_token_scores.ndjson"),
           "--output", path("scaled.ndjson")});
  const auto r = run_cli({"safety", "--input", fixture("safety_set.ndjson"), "--scores", path("scaled.ndjson"),
                          "--format", "csv", "--tie-tol", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("model-a,0.5,0.5,0.5\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, GroupByUnknownFieldIsDataError) {
  run_cli({"score", "--input", fixture("safety_set.ndjson"), "--scores", fixture("safety_token_scores.ndjson"),
           "--output", path("scaled.ndjson")});
  const auto r = run_cli({"safety", "--input", fixture("safety_set.ndjson"), "--scores", path("scaled.ndjson"),
                          "--group-by", "dialect"});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("dialect"), std::string::npos);
}

TEST_F(CliTest, ArchCorrelationFromSafetyTable) {
  for (const auto& [format, golden] : {std::pair{"csv", "table5_gpt2.csv"}, {"markdown", "table5_gpt2.md"}}) {
    const auto r = run_cli({"arch-corr", "--input", fixture("gpt2_arch.csv"), "--scores",
                            data_path("golden/table1_gpt2.csv").string(), "--format", format});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, read_file(data_path(std::string("golden/") + golden)));
  }
}

TEST_F(CliTest, Correlate) {
  const auto r = run_cli({"correlate", "--input", fixture("metrics.csv"), "--format", "markdown"});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden("correlate_metrics.md", r.out);
}

TEST_F(CliTest, UsageErrors) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"safety"},
           {"safety", "--input", "a", "--input", "b", "--scores", "c"},
           {"demo", "--harm-threshold", "7"},
           {"demo", "--tie-tol", "-1"},
           {"demo", "--format", "yaml"},
           {"ingest", "--input", "x", "--format", "csv"},
           {"demo", "--seed", "minus-one"},
           {"nonsense"}}) {
    const auto r = run_cli(args);
    EXPECT_EQ(r.code, cli::kExitUsage) << (args.empty() ? "" : args[0]) << ": " << r.err;
    EXPECT_EQ(r.err.rfind("error: kind=usage message=", 0), 0u) << r.err;
    EXPECT_TRUE(r.out.empty());
  }
}

TEST_F(CliTest, HelpExitsCleanly) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("safety"), std::string::npos);
}

TEST_F(CliTest, DataErrors) {
  auto r = run_cli({"safety", "--input", path("missing.ndjson"), "--scores", path("missing.ndjson")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_EQ(r.err.rfind("error: kind=data message=", 0), 0u) << r.err;

  // scores cover only part of the set
  const auto all = read_file(fixture("safety_token_scores.ndjson"));
  std::ofstream(path("partial.ndjson")) << all.substr(0, all.find('\n') + 1);
  r = run_cli({"score", "--input", fixture("safety_set.ndjson"), "--scores", path("partial.ndjson")});
  EXPECT_EQ(r.code, cli::kExitData);
}

TEST_F(CliTest, FailedRunLeavesOutputUntouched) {
  std::ofstream(path("out.md")) << "previous";
  const auto r = run_cli({"safety", "--input", fixture("safety_set.ndjson"), "--scores",
                          fixture("safety_set.ndjson"), "--output", path("out.md")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_EQ(read_file(path("out.md")), "previous");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir_)) ++files;
  EXPECT_EQ(files, 1u);
}

TEST_F(CliTest, UnwritableOutputIsDataError) {
  const auto r = run_cli({"demo", "--output", path("no/such/dir/out.md")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_FALSE(fs::exists(path("no")));
}

TEST_F(CliTest, SuccessfulRunReplacesOutput) {
  std::ofstream(path("out.md")) << "previous";
  const auto r = run_cli({"demo", "--output", path("out.md")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(path("out.md")), run_cli({"demo"}).out);
}

}  // namespace
}  // namespace safescore
