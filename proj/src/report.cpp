#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include <fmt/format.h>

#include "fcjudge/runner.hpp"
#include "fcjudge/text_util.hpp"

namespace fcjudge {
namespace {

using json = nlohmann::json;

struct Column {
  std::string name;
  int decimals = 2;
};

struct Row {
  std::string label;
  std::vector<std::optional<double>> cells;
};

struct Table {
  std::string key;
  std::string title;
  std::vector<Column> columns;  // excluding the label column
  std::vector<Row> rows;
};

std::string Cell(const std::optional<double>& v, int decimals) {
  return v ? fmt::format("{:.{}f}", *v, decimals) : std::string("-");
}

std::optional<double> Lookup(const MetricMap& m, const std::string& key, double scale = 1.0) {
  auto it = m.find(key);
  if (it == m.end() || it->second.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str()) return std::nullopt;
  return v * scale;
}

std::string Get(const MetricMap& m, const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? std::string() : it->second;
}

// Entry names for one task family ("ei", "ranking", "rating"), taken from
// keys of the form family.<name>.n
std::vector<std::string> EntryNames(const MetricMap& m, const std::string& family) {
  std::vector<std::string> names;
  const std::string head = family + ".";
  for (const auto& [key, value] : m) {
    if (key.rfind(head, 0) != 0) continue;
    const auto rest = key.substr(head.size());
    const auto dot = rest.find('.');
    if (dot == std::string::npos) continue;
    auto name = rest.substr(0, dot);
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
  return names;
}

std::string RunLabel(const MetricMap& m, std::size_t index, std::size_t total) {
  std::string label = Get(m, "run.model");
  if (label.empty()) label = "run";
  const auto task = Get(m, "run.task");
  if (!task.empty()) label += " " + task;
  if (total > 1) label += fmt::format(" #{}", index + 1);
  return label;
}

std::string RenderText(const std::vector<Table>& tables) {
  std::string out;
  for (const auto& table : tables) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"System"};
    for (const auto& c : table.columns) header.push_back(c.name);
    grid.push_back(header);
    for (const auto& row : table.rows) {
      std::vector<std::string> line{row.label};
      for (std::size_t i = 0; i < table.columns.size(); ++i) {
        line.push_back(Cell(row.cells[i], table.columns[i].decimals));
      }
      grid.push_back(line);
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : grid) {
      for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    }
    out += table.title + "\n";
    for (std::size_t r = 0; r < grid.size(); ++r) {
      std::string text;
      for (std::size_t i = 0; i < grid[r].size(); ++i) {
        if (i == 0) {
          text += fmt::format("{:<{}}", grid[r][i], width[i]);
        } else {
          text += fmt::format("  {:>{}}", grid[r][i], width[i]);
        }
      }
      out += text + "\n";
      if (r == 0) {
        std::size_t total = 0;
        for (auto w : width) total += w + 2;
        out += std::string(total - 2, '-') + "\n";
      }
    }
    out += "\n";
  }
  return out;
}

std::string RenderTsv(const std::vector<Table>& tables) {
  std::string out;
  for (const auto& table : tables) {
    out += "# " + table.title + "\n";
    out += "System";
    for (const auto& c : table.columns) out += "\t" + c.name;
    out += "\n";
    for (const auto& row : table.rows) {
      out += row.label;
      for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += "\t" + Cell(row.cells[i], table.columns[i].decimals);
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

json RenderJson(const std::vector<Table>& tables) {
  json out = json::object();
  for (const auto& table : tables) {
    json columns = json::array();
    for (const auto& c : table.columns) columns.push_back(c.name);
    json rows = json::array();
    for (const auto& row : table.rows) {
      json cells = json::array();
      for (const auto& v : row.cells) cells.push_back(v ? json(*v) : json(nullptr));
      rows.push_back({{"system", row.label}, {"values", cells}});
    }
    out[table.key] = {{"title", table.title}, {"columns", columns}, {"rows", rows}};
  }
  return out;
}

RenderedReport Finish(const std::vector<Table>& tables) {
  return RenderedReport{RenderText(tables), RenderTsv(tables), RenderJson(tables)};
}

std::optional<double> JsonNumber(const json& v, double scale = 1.0) {
  if (v.is_number()) return v.get<double>() * scale;
  return std::nullopt;
}

Table EntailmentTable(const std::vector<MetricMap>& runs, const json& reference) {
  Table table{"entailment", "Balanced accuracy (%)", {}, {}};
  for (Dataset d : kAllDatasets) table.columns.push_back({std::string(ToString(d)), 1});
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& m = runs[r];
    const auto names = EntryNames(m, "ei");
    if (names.empty()) continue;
    // Per column, prefer the test split when both splits were run.
    std::vector<std::string> chosen(table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      for (const auto& name : names) {
        if (Get(m, "ei." + name + ".dataset") != table.columns[c].name) continue;
        if (chosen[c].empty() || Get(m, "ei." + name + ".split") == "test") chosen[c] = name;
      }
    }
    const auto label = RunLabel(m, r, runs.size());
    for (const auto& [suffix, metric] : {std::pair{"", "bacc"}, std::pair{" sensitivity", "sensitivity"},
                                         std::pair{" specificity", "specificity"}}) {
      Row row{label + suffix, {}};
      for (const auto& name : chosen) {
        row.cells.push_back(name.empty() ? std::nullopt : Lookup(m, "ei." + name + "." + metric, 100.0));
      }
      table.rows.push_back(std::move(row));
    }
  }
  if (!table.rows.empty() && reference.contains("entailment_balanced_accuracy")) {
    const auto& ref = reference.at("entailment_balanced_accuracy");
    const auto ref_columns = ref.at("columns").get<std::vector<std::string>>();
    for (const auto& entry : ref.at("rows")) {
      Row row{"[published] " + entry.at("system").get<std::string>(), {}};
      for (const auto& col : table.columns) {
        auto it = std::find(ref_columns.begin(), ref_columns.end(), col.name);
        row.cells.push_back(it == ref_columns.end() ? std::nullopt
                                                    : JsonNumber(entry.at("values").at(it - ref_columns.begin())));
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

Table RankingTable(const std::vector<MetricMap>& runs, const json& reference) {
  Table table{"ranking",
              "Summary ranking",
              {{"Accuracy (%)", 1}, {"n", 0}, {"Invalid", 0}, {"A chosen (%)", 1}, {"Gold in A (%)", 1}},
              {}};
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& m = runs[r];
    const auto names = EntryNames(m, "ranking");
    for (const auto& name : names) {
      const std::string p = "ranking." + name + ".";
      std::string label = RunLabel(m, r, runs.size());
      if (names.size() > 1) label += " " + name;
      const auto ordering = Get(m, p + "ordering");
      if (!ordering.empty()) label += " (" + ordering + ")";
      table.rows.push_back({label,
                            {Lookup(m, p + "accuracy", 100.0), Lookup(m, p + "n"), Lookup(m, p + "invalid"),
                             Lookup(m, p + "a_choice_rate", 100.0), Lookup(m, p + "gold_a_rate", 100.0)}});
    }
  }
  if (!table.rows.empty() && reference.contains("ranking_accuracy")) {
    for (const auto& entry : reference.at("ranking_accuracy").at("rows")) {
      table.rows.push_back({"[published] " + entry.at("system").get<std::string>(),
                            {JsonNumber(entry.at("value")), std::nullopt, std::nullopt, std::nullopt, std::nullopt}});
    }
  }
  return table;
}

Table RatingTable(const std::vector<MetricMap>& runs, const json& reference) {
  // (column group label, dataset, metric subgroup)
  const std::vector<std::tuple<std::string, std::string, std::string>> groups = {
      {"FRANK", "FRANK", "all"},
      {"FRANK(CNN/DM)", "FRANK", "cnndm"},
      {"FRANK(XSum)", "FRANK", "xsum"},
      {"SummEval", "SummEval", "all"},
  };
  const std::vector<std::pair<std::string, std::string>> stats = {
      {"P", "pearson"}, {"S", "spearman"}, {"K", "kendall"}};
  Table table{"rating", "Rating correlation with human scores (P=Pearson, S=Spearman, K=Kendall)", {}, {}};
  for (const auto& [label, dataset, sub] : groups) {
    for (const auto& [abbrev, stat] : stats) table.columns.push_back({label + " " + abbrev, 2});
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& m = runs[r];
    const auto names = EntryNames(m, "rating");
    if (names.empty()) continue;
    Row row{RunLabel(m, r, runs.size()), {}};
    for (const auto& [label, dataset, sub] : groups) {
      std::string entry;
      for (const auto& name : names) {
        if (Get(m, "rating." + name + ".dataset") == dataset) entry = name;
      }
      for (const auto& [abbrev, stat] : stats) {
        row.cells.push_back(entry.empty() ? std::nullopt
                                          : Lookup(m, "rating." + entry + "." + sub + "." + stat));
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!table.rows.empty() && reference.contains("rating_correlation")) {
    const auto& ref = reference.at("rating_correlation");
    const auto ref_columns = ref.at("columns").get<std::vector<std::string>>();
    for (const auto& entry : ref.at("rows")) {
      Row row{"[published] " + entry.at("system").get<std::string>(), {}};
      for (const auto& [label, dataset, sub] : groups) {
        auto it = std::find(ref_columns.begin(), ref_columns.end(), label);
        const auto idx = static_cast<std::size_t>(it - ref_columns.begin());
        const bool known = it != ref_columns.end();
        row.cells.push_back(known ? JsonNumber(entry.at("pearson").at(idx)) : std::nullopt);
        row.cells.push_back(known ? JsonNumber(entry.at("spearman").at(idx)) : std::nullopt);
        row.cells.push_back(std::nullopt);
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

Row OverlapRow(const std::string& label, const GroupOverlap& g) {
  Row row{label, {static_cast<double>(g.count)}};
  for (int n = 1; n <= kMaxNgramOrder; ++n) {
    auto it = g.mean_novel_fraction.find(n);
    row.cells.push_back(it == g.mean_novel_fraction.end() ? std::nullopt : std::optional<double>(it->second));
  }
  row.cells.push_back(g.mean_lcs_ratio);
  return row;
}

std::vector<Column> OverlapColumns() {
  std::vector<Column> cols{{"n", 0}};
  for (int n = 1; n <= kMaxNgramOrder; ++n) cols.push_back({fmt::format("novel {}-gram", n), 3});
  cols.push_back({"LCS ratio", 3});
  return cols;
}

}  // namespace

ReferenceResults ReferenceResults::Load(const std::string& asset_dir) {
  const auto path = std::filesystem::path(asset_dir) / "reference" / "published_results.json";
  if (!std::filesystem::exists(path)) return ReferenceResults{json::object()};
  return ReferenceResults{json::parse(ReadFile(path.string()))};
}

RenderedReport RenderReport(const std::vector<MetricMap>& metrics, const ReferenceResults& reference) {
  return Finish({EntailmentTable(metrics, reference.doc), RankingTable(metrics, reference.doc),
                 RatingTable(metrics, reference.doc)});
}

RenderedReport RenderProbeReport(std::span<const EIRecord> records,
                                 const std::optional<std::vector<EIVerdict>>& verdicts) {
  std::vector<EIVerdict> aligned;
  if (verdicts) {
    if (verdicts->size() != records.size()) {
      throw InvalidInput(fmt::format("{} verdicts for {} records", verdicts->size(), records.size()));
    }
    aligned = *verdicts;
  } else {
    aligned.assign(records.size(), EIVerdict{});
  }
  const BiasReport report = BuildBiasReport(records, aligned);
  std::vector<Table> tables;
  Table by_dataset{"by_dataset", "Lexical overlap by dataset", OverlapColumns(), {}};
  for (const auto& [dataset, group] : report.by_dataset) {
    by_dataset.rows.push_back(OverlapRow(std::string(ToString(dataset)), group));
  }
  tables.push_back(std::move(by_dataset));
  Table by_origin{"by_origin", "Lexical overlap by source corpus", OverlapColumns(), {}};
  for (const auto& [origin, group] : report.by_origin) {
    by_origin.rows.push_back(OverlapRow(std::string(ToString(origin)), group));
  }
  tables.push_back(std::move(by_origin));
  if (verdicts) {
    Table by_outcome{"by_outcome", "Lexical overlap by gold label and judge verdict", OverlapColumns(), {}};
    for (auto gold : {ConsistencyLabel::kConsistent, ConsistencyLabel::kInconsistent}) {
      for (auto pred : {EIVerdictValue::kConsistent, EIVerdictValue::kInconsistent, EIVerdictValue::kUnparseable}) {
        const auto group = report.Outcome(gold, pred);
        const auto label = fmt::format("gold {} / judged {}", ToString(gold), ToString(pred));
        if (group) {
          by_outcome.rows.push_back(OverlapRow(label, *group));
        } else {
          Row empty{label, {0.0}};
          empty.cells.resize(by_outcome.columns.size());
          by_outcome.rows.push_back(std::move(empty));
        }
      }
    }
    tables.push_back(std::move(by_outcome));
  }
  return Finish(tables);
}

}  // namespace fcjudge
