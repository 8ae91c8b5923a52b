#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "demo.hpp"
#include "safescore/analysis.hpp"
#include "safescore/analysis_io.hpp"
#include "safescore/corpus_io.hpp"
#include "safescore/rankstat.hpp"
#include "safescore/report.hpp"
#include "safescore/scoring_io.hpp"

namespace safescore::cli {
namespace {

namespace fs = std::filesystem;

std::string_view command_name(Command c) {
  switch (c) {
    case Command::ingest: return "ingest";
    case Command::score: return "score";
    case Command::safety: return "safety";
    case Command::summarize: return "summarize";
    case Command::correlate: return "correlate";
    case Command::arch_corr: return "arch-corr";
    case Command::demo: return "demo";
  }
  return "?";
}

OutputFormat effective_format(const RunConfig& c) {
  if (c.format) return *c.format;
  return c.command == Command::ingest || c.command == Command::score ? OutputFormat::ndjson
                                                                      : OutputFormat::markdown;
}

TableFormat table_format(OutputFormat f) {
  return f == OutputFormat::csv ? TableFormat::csv : TableFormat::markdown;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path));
  return in;
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += fmt::format(".tmp-{}", ::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw DataError(fmt::format("cannot write '{}'", path.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw DataError(fmt::format("cannot move output into '{}': {}", path.string(), ec.message()));
  }
}

void warn(std::ostream& err, std::string_view message) { err << "warning: " << message << '\n'; }

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

std::string joined_paths(const std::vector<std::string>& paths) {
  std::string out;
  for (const auto& p : paths) out += (out.empty() ? "" : ",") + fs::path(p).filename().string();
  return out;
}

EvaluationSet load_set(const std::string& path) {
  auto in = open_input(path);
  return read_evaluation_set(in, fs::path(path).filename().string());
}

std::vector<ScaledScore> load_scaled(const std::vector<std::string>& paths) {
  std::vector<ScaledScore> all;
  for (const auto& p : paths) {
    auto in = open_input(p);
    auto scores = read_scaled_scores(in);
    all.insert(all.end(), std::make_move_iterator(scores.begin()), std::make_move_iterator(scores.end()));
  }
  return all;
}

template <typename Records>
std::vector<std::string> model_ids(const Records& records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.model_id);
  return {ids.begin(), ids.end()};
}

GroupKey make_group_key(const std::string& name) {
  if (name == "target_group") return group_by_target();
  if (name == "none") return [](const SentenceRecord&) { return std::string(kUngroupedTarget); };
  return [name](const SentenceRecord& r) {
    auto it = r.extra.find(name);
    if (it == r.extra.end() || !it->is_string()) {
      throw DataError(fmt::format("record '{}': no string field '{}' to group by", r.id, name));
    }
    return it->get<std::string>();
  };
}

InputKind detect_kind(const std::string& content, const std::string& path) {
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto o = nlohmann::json::parse(line);
      if (o.contains("annotator_target_groups")) return InputKind::annotated;
      if (o.contains("label")) return InputKind::binary;
    } catch (const nlohmann::json::exception&) {
    }
    break;
  }
  throw DataError(fmt::format("'{}': cannot tell annotated from binary-labeled records; use --kind",
                              path));
}

std::string cmd_ingest(const RunConfig& c, std::ostream& err) {
  const auto provenance = c.provenance.empty() ? joined_paths(c.input_paths) : c.provenance;
  std::vector<RawAnnotation> annotated;
  std::vector<BinaryRecord> binary;
  std::vector<Issue> issues;
  for (const auto& path : c.input_paths) {
    auto in = open_input(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto content = buffer.str();
    const auto kind = c.input_kind == InputKind::automatic ? detect_kind(content, path) : c.input_kind;
    std::istringstream records(content);
    if (kind == InputKind::annotated) {
      auto file = read_raw_annotations(records);
      annotated.insert(annotated.end(), file.records.begin(), file.records.end());
      issues.insert(issues.end(), file.issues.begin(), file.issues.end());
    } else {
      auto file = read_binary_records(records);
      binary.insert(binary.end(), file.records.begin(), file.records.end());
      issues.insert(issues.end(), file.issues.begin(), file.issues.end());
    }
  }
  if (!annotated.empty() && !binary.empty()) {
    throw DataError("cannot mix annotated and binary-labeled inputs in one evaluation set");
  }

  EvaluationSet set;
  if (!binary.empty()) {
    set = map_binary_dataset(binary, provenance);
  } else {
    auto result = ingest_annotations(annotated, c.harm_threshold, provenance);
    issues.insert(issues.end(), result.issues.begin(), result.issues.end());
    err << fmt::format("ingest: {} annotated records, {} without target agreement, {} kept\n",
                       result.input_count, result.disagreement_count, result.set.size());
    set = std::move(result.set);
  }
  for (const auto& issue : issues) warn(err, "dropped " + describe(issue));

  if (c.balance) {
    auto balanced = downsample_balanced(set, c.seed);
    for (const auto& w : balanced.warnings) warn(err, w);
    set = std::move(balanced.set);
  }
  std::ostringstream out;
  write_evaluation_set(out, set);
  return out.str();
}

std::string cmd_score(const RunConfig& c) {
  const auto set = load_set(c.input_paths.front());
  std::vector<TokenScoreRecord> tokens;
  for (const auto& p : c.score_paths) {
    auto in = open_input(p);
    auto records = read_token_scores(in);
    tokens.insert(tokens.end(), std::make_move_iterator(records.begin()),
                  std::make_move_iterator(records.end()));
  }
  if (tokens.empty()) throw DataError("no token score records");
  std::ostringstream out;
  for (const auto& model : model_ids(tokens)) {
    const auto scaled = score_evaluation_set(set, tokens, model);
    write_scaled_scores(out, scaled);
  }
  return out.str();
}

std::string cmd_safety(const RunConfig& c, std::ostream& err) {
  const auto set = load_set(c.input_paths.front());
  const auto scaled = load_scaled(c.score_paths);
  if (scaled.empty()) throw DataError("no scaled score records");
  const auto key = make_group_key(c.group_by);

  std::vector<SafetyReport> reports;
  for (const auto& model : model_ids(scaled)) {
    reports.push_back(per_group_report(scaled, set, model, c.tie_tol, key));
    for (const auto& g : reports.back().excluded) {
      warn(err, fmt::format("model '{}': group '{}' excluded ({})", model, g.group, g.reason));
    }
  }
  std::ostringstream out;
  const auto format = effective_format(c);
  if (format == OutputFormat::ndjson) {
    write_safety_records(out, reports);
  } else {
    render_safety_table(out, reports, table_format(format));
  }
  return out.str();
}

std::string cmd_summarize(const RunConfig& c) {
  const auto set = load_set(c.input_paths.front());
  const auto scaled = load_scaled(c.score_paths);
  if (scaled.empty()) throw DataError("no scaled score records");

  std::map<std::string, Label, std::less<>> labels;
  for (const auto& r : set.records()) labels.emplace(r.id, r.label);

  std::vector<ModelLogPpl> rows;
  for (const auto& model : model_ids(scaled)) {
    std::map<std::string_view, const ScaledScore*> by_id;
    for (const auto& s : scaled) {
      if (s.model_id != model || !labels.contains(s.sentence_id)) continue;
      if (!by_id.emplace(s.sentence_id, &s).second) {
        throw DataError(fmt::format("model '{}': duplicate scaled score for '{}'", model, s.sentence_id));
      }
    }
    std::vector<ScaledScore> joined;
    for (const auto& r : set.records()) {
      auto it = by_id.find(r.id);
      if (it == by_id.end()) throw DataError(fmt::format("model '{}': no scaled score for '{}'", model, r.id));
      joined.push_back(*it->second);
    }
    rows.push_back({model, logppl_summary(joined, labels)});
  }
  std::ostringstream out;
  const auto format = effective_format(c);
  if (format == OutputFormat::ndjson) {
    write_logppl_records(out, rows);
  } else {
    render_logppl_table(out, rows, table_format(format));
  }
  return out.str();
}

std::string cmd_correlate(const RunConfig& c) {
  std::map<std::string, MetricVector> merged;
  for (const auto& p : c.input_paths) {
    auto in = open_input(p);
    for (auto& v : read_metric_vectors(in)) {
      auto& target = merged[v.metric_name];
      target.metric_name = v.metric_name;
      target.values.insert(target.values.end(), v.values.begin(), v.values.end());
    }
  }
  std::vector<MetricVector> vectors;
  for (auto& [name, v] : merged) vectors.push_back(std::move(v));
  const auto matrix = metric_correlation_matrix(vectors);

  std::ostringstream out;
  const auto format = effective_format(c);
  if (format == OutputFormat::ndjson) {
    write_correlation_records(out, matrix);
  } else {
    render_correlation_matrix(out, matrix, table_format(format));
  }
  return out.str();
}

std::string cmd_arch_corr(const RunConfig& c, std::ostream& err) {
  auto arch_in = open_input(c.input_paths.front());
  const auto specs = read_arch_specs(arch_in);
  auto safety_in = open_input(c.score_paths.front());
  const auto safety = read_average_safety(safety_in);

  std::map<std::string, std::vector<ArchRow>> families;
  for (const auto& spec : specs) {
    const auto family = spec.family.empty() ? std::string(kUngroupedTarget) : spec.family;
    auto it = safety.find(spec.model_id);
    if (it == safety.end()) {
      warn(err, fmt::format("model '{}' has no average safety; skipped", spec.model_id));
      continue;
    }
    families[family].push_back({spec, it->second});
  }
  if (families.empty()) throw DataError("no model appears in both the architecture and safety tables");

  std::vector<FamilyCorrelation> rows;
  for (const auto& [family, members] : families) {
    try {
      rows.push_back({family, arch_correlation(members)});
    } catch (const DataError& e) {
      throw DataError(fmt::format("family '{}': {}", family, e.what()));
    }
  }
  std::ostringstream out;
  const auto format = effective_format(c);
  if (format == OutputFormat::ndjson) {
    write_arch_records(out, rows);
  } else {
    render_arch_table(out, rows, table_format(format));
  }
  return out.str();
}

std::string cmd_demo(const RunConfig& c, std::ostream& err) {
  const auto result = demo::run(c.seed, c.tie_tol, c.harm_threshold);
  err << fmt::format("demo: {} annotated sentences, {} with target agreement, {} after balancing (seed {})\n",
                     result.annotated, result.unanimous, result.balanced, c.seed);
  for (const auto& w : result.warnings) warn(err, w);

  std::ostringstream out;
  const auto format = effective_format(c);
  if (format == OutputFormat::ndjson) {
    write_safety_records(out, result.reports);
    write_logppl_records(out, result.log_perplexity);
  } else {
    render_safety_table(out, result.reports, table_format(format));
    out << '\n';
    render_logppl_table(out, result.log_perplexity, table_format(format));
  }
  return out.str();
}

}  // namespace

void check(const RunConfig& c) {
  const auto name = command_name(c.command);
  auto need_inputs = [&](std::size_t min, std::size_t max) {
    if (c.input_paths.size() < min || c.input_paths.size() > max) {
      throw UsageError(max == min ? fmt::format("{} takes exactly {} --input", name, min)
                                  : fmt::format("{} takes at least {} --input", name, min));
    }
  };
  auto need_scores = [&](std::size_t min, std::size_t max) {
    if (c.score_paths.size() < min || c.score_paths.size() > max) {
      throw UsageError(max == min ? fmt::format("{} takes exactly {} --scores", name, min)
                                  : fmt::format("{} takes at least {} --scores", name, min));
    }
  };
  constexpr std::size_t kMany = static_cast<std::size_t>(-1);
  switch (c.command) {
    case Command::ingest: need_inputs(1, kMany); need_scores(0, 0); break;
    case Command::score:
    case Command::safety:
    case Command::summarize: need_inputs(1, 1); need_scores(1, kMany); break;
    case Command::correlate: need_inputs(1, kMany); need_scores(0, 0); break;
    case Command::arch_corr: need_inputs(1, 1); need_scores(1, 1); break;
    case Command::demo: need_inputs(0, 0); need_scores(0, 0); break;
  }
  if (!(c.harm_threshold >= kMinToxicity && c.harm_threshold <= kMaxToxicity)) {
    throw UsageError(fmt::format("--harm-threshold {} outside [1, 5]", c.harm_threshold));
  }
  if (!(c.tie_tol >= 0.0) || !std::isfinite(c.tie_tol)) {
    throw UsageError(fmt::format("--tie-tol {} must be finite and >= 0", c.tie_tol));
  }
  if ((c.command == Command::ingest || c.command == Command::score) && c.format &&
      *c.format != OutputFormat::ndjson) {
    throw UsageError(fmt::format("{} only writes ndjson", name));
  }
  if (c.group_by.empty()) throw UsageError("--group-by must not be empty");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    check(config);
    std::string content;
    switch (config.command) {
      case Command::ingest: content = cmd_ingest(config, err); break;
      case Command::score: content = cmd_score(config); break;
      case Command::safety: content = cmd_safety(config, err); break;
      case Command::summarize: content = cmd_summarize(config); break;
      case Command::correlate: content = cmd_correlate(config); break;
      case Command::arch_corr: content = cmd_arch_corr(config, err); break;
      case Command::demo: content = cmd_demo(config, err); break;
    }
    if (config.output_path.empty() || config.output_path == "-") {
      out << content;
      out.flush();
    } else {
      write_atomically(config.output_path, content);
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: kind=usage message=" << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: kind=data message=" << one_line(e.what()) << '\n';
    return kExitData;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toxicity-scaled perplexity safety scores for language models", "safescore"};
  app.require_subcommand(1);
  RunConfig config;

  const std::map<std::string, OutputFormat> formats{
      {"csv", OutputFormat::csv}, {"markdown", OutputFormat::markdown}, {"ndjson", OutputFormat::ndjson}};
  const std::map<std::string, InputKind> kinds{
      {"auto", InputKind::automatic}, {"annotated", InputKind::annotated}, {"binary", InputKind::binary}};
  OutputFormat format{};

  struct Spec {
    Command command;
    const char* help;
  };
  const std::vector<Spec> specs{
      {Command::ingest, "Filter and label annotated sentences into an evaluation set"},
      {Command::score, "Turn per-token log-probabilities into toxicity-scaled scores"},
      {Command::safety, "Safety score per group and model"},
      {Command::summarize, "Benign/harmful log-perplexity mean and standard deviation per model"},
      {Command::correlate, "Pearson correlation matrix between metric vectors"},
      {Command::arch_corr, "Correlate average safety with heads, layers and hidden size"},
      {Command::demo, "End-to-end run on bundled synthetic data with a toy n-gram model"},
  };
  std::vector<std::pair<CLI::App*, Command>> subcommands;
  for (const auto& spec : specs) {
    auto* sub = app.add_subcommand(std::string(command_name(spec.command)), spec.help);
    sub->add_option("--input", config.input_paths, "Input file(s)");
    sub->add_option("--scores", config.score_paths, "Score file(s)");
    sub->add_option("--output", config.output_path, "Output path (default stdout)");
    sub->add_option("--harm-threshold", config.harm_threshold,
                    "Mean toxicity above which a sentence is harmful")
        ->capture_default_str();
    sub->add_option("--tie-tol", config.tie_tol, "Tolerance under which scaled scores tie")
        ->capture_default_str();
    sub->add_option("--seed", config.seed, "Seed for all sampling")->capture_default_str();
    sub->add_option("--format", format, "csv, markdown or ndjson")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_option("--group-by", config.group_by,
                    "target_group, none, or a passthrough record field")
        ->capture_default_str();
    if (spec.command == Command::ingest) {
      sub->add_option("--kind", config.input_kind, "auto, annotated or binary")
          ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
      sub->add_flag("--balance", config.balance, "Downsample each group to equal label counts");
      sub->add_option("--provenance", config.provenance, "Provenance label for the set");
    }
    subcommands.emplace_back(sub, spec.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: kind=usage message=" << one_line(e.what()) << '\n';
    return kExitUsage;
  }
  for (const auto& [sub, command] : subcommands) {
    if (sub->parsed()) {
      config.command = command;
      if (sub->count("--format") > 0) config.format = format;
    }
  }
  return run(config, out, err);
}

}  // namespace safescore::cli
