#include "safescore/report.hpp"

#include <map>
#include <set>

#include <fmt/format.h>

#include "safescore/csv.hpp"
#include "safescore/ndjson.hpp"

namespace safescore {
namespace {

using nlohmann::json;

constexpr std::string_view kNotAvailable = "n/a";

std::string markdown_cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string number(double value, TableFormat format) {
  return format == TableFormat::csv ? fmt::format("{}", value) : fmt::format("{:.4f}", value);
}

std::string number(const std::optional<double>& value, TableFormat format) {
  return value ? number(*value, format) : std::string(kNotAvailable);
}

// Schema line, header row and (for Markdown) the alignment row.
void begin_table(std::ostream& out, std::string_view kind, const std::vector<std::string>& header,
                 TableFormat format) {
  if (format == TableFormat::csv) {
    out << "# safescore " << kSchemaVersion << ' ' << kind << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_escape(header[i]);
    out << '\n';
    return;
  }
  out << "<!-- safescore " << kSchemaVersion << ' ' << kind << " -->\n|";
  for (const auto& h : header) out << ' ' << markdown_cell(h) << " |";
  out << "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
  out << '\n';
}

void table_row(std::ostream& out, const std::vector<std::string>& cells, TableFormat format) {
  if (format == TableFormat::csv) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_escape(cells[i]);
    out << '\n';
    return;
  }
  out << '|';
  for (const auto& c : cells) out << ' ' << markdown_cell(c) << " |";
  out << '\n';
}

}  // namespace

void render_safety_table(std::ostream& out, std::span<const SafetyReport> reports,
                         TableFormat format) {
  std::set<std::string> groups;
  for (const auto& r : reports) {
    for (const auto& g : r.per_group) groups.insert(g.group);
    for (const auto& g : r.excluded) groups.insert(g.group);
  }

  std::vector<std::string> header{format == TableFormat::csv ? "model_id" : "Model"};
  header.insert(header.end(), groups.begin(), groups.end());
  header.emplace_back(format == TableFormat::csv ? "average" : "Average");
  begin_table(out, "safety", header, format);

  for (const auto& r : reports) {
    std::map<std::string_view, double> safety;
    for (const auto& g : r.per_group) safety.emplace(g.group, g.safety);
    std::vector<std::string> cells{r.model_id};
    for (const auto& g : groups) {
      auto it = safety.find(g);
      cells.push_back(it == safety.end() ? std::string(kNotAvailable) : number(it->second, format));
    }
    cells.push_back(number(r.average_safety, format));
    table_row(out, cells, format);
  }
}

void write_safety_records(std::ostream& out, std::span<const SafetyReport> reports) {
  for (const auto& r : reports) {
    std::map<std::string_view, json> rows;
    for (const auto& g : r.per_group) {
      rows[g.group] = json{{"model_id", r.model_id}, {"group", g.group}, {"u", g.u},
                           {"n", g.n},              {"m", g.m},         {"safety", g.safety}};
    }
    for (const auto& g : r.excluded) {
      rows[g.group] = json{{"model_id", r.model_id}, {"group", g.group}, {"u", nullptr},
                           {"n", g.n},              {"m", g.m},         {"safety", nullptr},
                           {"excluded", g.reason}};
    }
    for (auto& [group, row] : rows) write_json_line(out, std::move(row));
  }
}

namespace {

std::string mean_pm_std(const LabelStats& s, TableFormat format) {
  if (!s.mean) return std::string(kNotAvailable);
  return fmt::format("{} ± {}", number(*s.mean, format), number(s.stddev, format));
}

json stats_json(const LabelStats& s) {
  json o{{"n", s.count}, {"mean", nullptr}, {"std", nullptr}};
  if (s.mean) o["mean"] = *s.mean;
  if (s.stddev) o["std"] = *s.stddev;
  return o;
}

}  // namespace

void render_logppl_table(std::ostream& out, std::span<const ModelLogPpl> rows, TableFormat format) {
  if (format == TableFormat::csv) {
    begin_table(out, "log-perplexity",
                {"model_id", "benign_n", "benign_mean", "benign_std", "harmful_n", "harmful_mean",
                 "harmful_std"},
                format);
    for (const auto& r : rows) {
      const auto& b = r.summary.benign;
      const auto& h = r.summary.harmful;
      table_row(out,
                {r.model_id, std::to_string(b.count), number(b.mean, format), number(b.stddev, format),
                 std::to_string(h.count), number(h.mean, format), number(h.stddev, format)},
                format);
    }
    return;
  }
  begin_table(out, "log-perplexity", {"Model", "Benign log-Perplexity", "Harmful log-Perplexity"},
              format);
  for (const auto& r : rows) {
    table_row(out,
              {r.model_id, mean_pm_std(r.summary.benign, format), mean_pm_std(r.summary.harmful, format)},
              format);
  }
}

void write_logppl_records(std::ostream& out, std::span<const ModelLogPpl> rows) {
  for (const auto& r : rows) {
    write_json_line(out, json{{"model_id", r.model_id},
                              {"benign", stats_json(r.summary.benign)},
                              {"harmful", stats_json(r.summary.harmful)}});
  }
}

namespace {

std::string correlation_text(const CorrelationCell& cell, TableFormat format) {
  if (cell.value) return number(*cell.value, format);
  if (cell.overlap < kMinCorrelationOverlap) return fmt::format("n/a (n={})", cell.overlap);
  return fmt::format("n/a ({})", cell.note);
}

}  // namespace

void render_correlation_matrix(std::ostream& out, const CorrelationMatrix& matrix,
                               TableFormat format) {
  std::vector<std::string> header{format == TableFormat::csv ? "metric" : "Metric"};
  header.insert(header.end(), matrix.names.begin(), matrix.names.end());
  begin_table(out, "pcc-matrix", header, format);
  for (std::size_t i = 0; i < matrix.names.size(); ++i) {
    std::vector<std::string> cells{matrix.names[i]};
    for (std::size_t j = 0; j < matrix.names.size(); ++j) {
      cells.push_back(correlation_text(matrix.at(i, j), format));
    }
    table_row(out, cells, format);
  }
}

void write_correlation_records(std::ostream& out, const CorrelationMatrix& matrix) {
  for (std::size_t i = 0; i < matrix.names.size(); ++i) {
    for (std::size_t j = 0; j < matrix.names.size(); ++j) {
      const auto& cell = matrix.at(i, j);
      json o{{"row", matrix.names[i]}, {"column", matrix.names[j]}, {"overlap", cell.overlap},
             {"pcc", nullptr}};
      if (cell.value) o["pcc"] = *cell.value;
      if (!cell.note.empty()) o["note"] = cell.note;
      write_json_line(out, std::move(o));
    }
  }
}

void render_arch_table(std::ostream& out, std::span<const FamilyCorrelation> rows,
                       TableFormat format) {
  if (format == TableFormat::csv) {
    begin_table(out, "arch-pcc", {"family", "pcc_heads", "pcc_layers", "pcc_hidden_dim"}, format);
  } else {
    begin_table(out, "arch-pcc", {"Family", "#Heads", "#Layers", "Hidden Dim"}, format);
  }
  for (const auto& r : rows) {
    table_row(out,
              {r.family, number(r.pcc.heads, format), number(r.pcc.layers, format),
               number(r.pcc.hidden_dim, format)},
              format);
  }
}

void write_arch_records(std::ostream& out, std::span<const FamilyCorrelation> rows) {
  for (const auto& r : rows) {
    write_json_line(out, json{{"family", r.family},
                              {"pcc_heads", r.pcc.heads},
                              {"pcc_layers", r.pcc.layers},
                              {"pcc_hidden_dim", r.pcc.hidden_dim}});
  }
}

}  // namespace safescore
