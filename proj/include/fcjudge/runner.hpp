// End-to-end orchestration: load data, render prompts, query the judge,
// parse, score, and write diff-able run artifacts.
//
// Output directory layout:
//   config.json      the full run configuration (no credentials)
//   verdicts.jsonl   one line per record: id, prompt checksum, request key,
//                    finish state, verdict, parse trace
//   metrics.txt      sorted key=value lines, no timings
//   rejections.jsonl records dropped by the loaders
//   report.txt / report.tsv / summary.json   rendered tables

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcjudge/datasets.hpp"
#include "fcjudge/judge_backend.hpp"
#include "fcjudge/lexical_probe.hpp"
#include "fcjudge/prompts.hpp"
#include "fcjudge/response_parser.hpp"

namespace fcjudge {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BackendSettings {
  std::string kind = "mock";  // "mock" or "live"
  std::string model = "gpt-3.5-turbo-0301";
  double temperature = kDefaultTemperature;
  int max_output_tokens = kDefaultMaxOutputTokens;
  std::size_t max_in_flight = 4;
  std::string cache_dir;
  bool resume = false;
  std::string mock_fixture;
  bool mock_strict = true;
  ChatCompletionsConfig live;
  std::size_t max_document_chars = 12000;
  int max_attempts = 5;
  double requests_per_second = 0.0;
};

struct RunConfig {
  PromptTask task = PromptTask::kEIZeroShot;
  std::string manifest_path;
  std::vector<DatasetManifest> manifests;  // filled from manifest_path when empty
  BackendSettings backend;
  std::string asset_dir;  // empty: DefaultAssetDir()
  std::string output_dir;
  std::uint64_t seed = 0;
  bool paper_faithful_ordering = false;
  ConsistencyLabel positive_class = ConsistencyLabel::kInconsistent;
  std::size_t sample_size = 0;  // 0 keeps every record; else a seeded sample
  std::size_t bootstrap_iterations = 0;
  bool group_by_system = false;
};

nlohmann::json ToJson(const RunConfig& config);
RunConfig RunConfigFromJson(const nlohmann::json& doc);

/// Flat, sorted metric map as written to metrics.txt.
using MetricMap = std::map<std::string, std::string>;

std::string SerializeMetrics(const MetricMap& metrics);
MetricMap ParseMetrics(std::string_view text);
MetricMap ReadMetricsFile(const std::string& path);

struct RunArtifacts {
  std::filesystem::path output_dir;
  MetricMap metrics;
  BatchSummary batch;
  bool position_bias_warning = false;
};

/// Builds the configured backend. Live backends check their credential here.
std::shared_ptr<ChatBackend> MakeBackend(const BackendSettings& settings);

/// Runs one task over every manifest entry. Data and configuration are
/// validated before the backend is created, so a bad config never reaches
/// a paid endpoint. `backend` overrides the configured one when given.
RunArtifacts Run(const RunConfig& config, std::shared_ptr<ChatBackend> backend = nullptr);

/// Published numbers shown next to a run for comparison.
struct ReferenceResults {
  nlohmann::json doc;
  static ReferenceResults Load(const std::string& asset_dir);
};

struct RenderedReport {
  std::string text;  // aligned plain-text tables
  std::string tsv;   // tab-separated, one table after another
  nlohmann::json summary;
};

/// Renders entailment, ranking and rating tables from one or more metric
/// maps. Missing cells print as "-". Reference rows appear only under
/// tables that have at least one run row.
RenderedReport RenderReport(const std::vector<MetricMap>& metrics, const ReferenceResults& reference);

/// Lexical-overlap tables: per dataset, per origin and, when verdicts are
/// given (aligned with records), per gold x predicted outcome.
RenderedReport RenderProbeReport(std::span<const EIRecord> records,
                                 const std::optional<std::vector<EIVerdict>>& verdicts);

/// Reads EI verdicts back from a verdicts.jsonl, keyed by record id.
std::map<std::string, EIVerdict> ReadEIVerdicts(const std::string& path);

/// Upstream-format converters. Each writes canonical line-delimited records
/// to `output` and returns how many were written; per-line problems are
/// logged and skipped.
enum class ImportFormat { kSummac, kSummEval, kFrank, kRanking };
std::optional<ImportFormat> ParseImportFormat(std::string_view text);
std::size_t ImportDataset(ImportFormat format, const std::string& input, const std::string& output);

}  // namespace fcjudge
