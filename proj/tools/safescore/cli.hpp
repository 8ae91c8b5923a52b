#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "safescore/corpus.hpp"

namespace safescore::cli {

enum class Command { ingest, score, safety, summarize, correlate, arch_corr, demo };
enum class OutputFormat { csv, markdown, ndjson };
enum class InputKind { automatic, annotated, binary };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command{Command::demo};
  std::vector<std::string> input_paths;
  std::vector<std::string> score_paths;
  std::string output_path;  // empty or "-" writes to the output stream
  double harm_threshold{kDefaultHarmThreshold};
  double tie_tol{0.0};
  std::uint64_t seed{0};
  std::optional<OutputFormat> format;  // per-command default when absent
  std::string group_by{"target_group"};
  InputKind input_kind{InputKind::automatic};
  bool balance{false};
  std::string provenance;
};

// Throws UsageError when arity, ranges or format do not fit the command.
void check(const RunConfig& config);

// Executes one command. Output files are written to a temporary file and
// renamed into place. Errors are reported on `err` as one
// `error: kind=<usage|data> message=...` line.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and runs.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace safescore::cli
