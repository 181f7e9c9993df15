// fcjudge: run, report, import, probe.

#include <CLI11.hpp>
#include <iostream>

#include <spdlog/spdlog.h>

#include "fcjudge/runner.hpp"
#include "fcjudge/text_util.hpp"

namespace {

using namespace fcjudge;

int RunCommand(RunConfig config, const std::string& task, const std::string& positive) {
  const auto parsed = ParsePromptTask(task);
  if (!parsed) throw ConfigError("unknown task '" + task + "' (ei_zs, ei_cot, ranking, rating)");
  config.task = *parsed;
  if (positive == "consistent") {
    config.positive_class = ConsistencyLabel::kConsistent;
  } else if (positive != "inconsistent") {
    throw ConfigError("positive class must be 'consistent' or 'inconsistent'");
  }
  const auto artifacts = Run(config);
  std::cout << ReadFile((artifacts.output_dir / "report.txt").string());
  const auto& b = artifacts.batch;
  std::cout << fmt::format("requests {}: complete {}, truncated {}, refused {}, transport errors {}, cache hits {}\n",
                           b.total, b.complete, b.truncated, b.refused, b.transport_errors, b.cache_hits);
  if (artifacts.position_bias_warning) std::cout << "WARNING: ranking answers are dominated by one slot\n";
  std::cout << "artifacts in " << artifacts.output_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-as-judge evaluation of summary factual consistency"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error");

  // run
  RunConfig config;
  std::string task = "ei_zs";
  std::string positive = "inconsistent";
  bool lenient = false;
  auto* run = app.add_subcommand("run", "Evaluate a judge on one task");
  run->add_option("--task", task, "ei_zs, ei_cot, ranking or rating")->capture_default_str();
  run->add_option("--manifest", config.manifest_path, "Dataset manifest (JSON)")->required();
  run->add_option("--out", config.output_dir, "Output directory")->required();
  run->add_option("--backend", config.backend.kind, "live or mock")
      ->check(CLI::IsMember({"live", "mock"}))
      ->capture_default_str();
  run->add_option("--model", config.backend.model)->capture_default_str();
  run->add_option("--temperature", config.backend.temperature)->check(CLI::NonNegativeNumber)->capture_default_str();
  run->add_option("--max-output-tokens", config.backend.max_output_tokens)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--max-in-flight", config.backend.max_in_flight)->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--max-attempts", config.backend.max_attempts)->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--rps", config.backend.requests_per_second, "Request rate limit, 0 disables");
  run->add_option("--cache-dir", config.backend.cache_dir, "Response cache (default <out>/cache)");
  run->add_flag("--resume", config.backend.resume, "Serve responses already in the cache");
  run->add_option("--mock-fixture", config.backend.mock_fixture, "Canned responses for the mock backend");
  run->add_flag("--mock-lenient", lenient, "Unknown mock keys answer with a refusal instead of failing");
  run->add_option("--base-url", config.backend.live.base_url)->capture_default_str();
  run->add_option("--endpoint-path", config.backend.live.path)->capture_default_str();
  run->add_option("--api-key-env", config.backend.live.api_key_env, "Variable holding the credential")
      ->capture_default_str();
  run->add_option("--max-doc-chars", config.backend.max_document_chars)->capture_default_str();
  run->add_option("--assets", config.asset_dir, "Template, lexicon and reference directory");
  run->add_option("--seed", config.seed)->capture_default_str();
  run->add_option("--sample", config.sample_size, "Evaluate a seeded sample of this many records per dataset");
  run->add_option("--bootstrap", config.bootstrap_iterations, "Bootstrap iterations for bACC intervals");
  run->add_option("--positive-class", positive)->capture_default_str();
  run->add_flag("--paper-faithful-ordering", config.paper_faithful_ordering,
                "Always put the consistent summary in slot A");
  run->add_flag("--group-by-system", config.group_by_system, "Rating correlations per summarizer");

  // report
  std::vector<std::string> metric_files;
  std::string report_out, report_assets;
  auto* report = app.add_subcommand("report", "Render tables from metrics files");
  report->add_option("metrics", metric_files, "metrics.txt files")->required();
  report->add_option("--out", report_out, "Directory for report.txt, report.tsv, summary.json");
  report->add_option("--assets", report_assets);

  // import
  std::string format, input, output;
  auto* import = app.add_subcommand("import", "Convert upstream files to canonical records");
  import->add_option("--format", format, "summac, summeval, frank or ranking")->required();
  import->add_option("--input", input)->required()->check(CLI::ExistingFile);
  import->add_option("--output", output)->required();

  // probe
  std::string probe_data, probe_dataset = "CoGenSumm", probe_verdicts;
  auto* probe = app.add_subcommand("probe", "Lexical overlap analysis of an entailment dataset");
  probe->add_option("--data", probe_data)->required()->check(CLI::ExistingFile);
  probe->add_option("--dataset", probe_dataset)->capture_default_str();
  probe->add_option("--verdicts", probe_verdicts, "verdicts.jsonl from a run over the same data");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));
  config.backend.mock_strict = !lenient;

  try {
    if (run->parsed()) return RunCommand(config, task, positive);
    if (report->parsed()) {
      std::vector<MetricMap> maps;
      for (const auto& f : metric_files) maps.push_back(ReadMetricsFile(f));
      const auto rendered =
          RenderReport(maps, ReferenceResults::Load(report_assets.empty() ? DefaultAssetDir() : report_assets));
      std::cout << rendered.text;
      if (!report_out.empty()) {
        std::filesystem::create_directories(report_out);
        std::ofstream(std::filesystem::path(report_out) / "report.txt") << rendered.text;
        std::ofstream(std::filesystem::path(report_out) / "report.tsv") << rendered.tsv;
        std::ofstream(std::filesystem::path(report_out) / "summary.json") << rendered.summary.dump(2) << "\n";
      }
      return 0;
    }
    if (import->parsed()) {
      const auto fmt_kind = ParseImportFormat(format);
      if (!fmt_kind) throw ConfigError("unknown import format '" + format + "'");
      std::cout << ImportDataset(*fmt_kind, input, output) << " records written to " << output << "\n";
      return 0;
    }
    if (probe->parsed()) {
      DatasetManifest m;
      m.name = probe_dataset;
      m.dataset = ParseDataset(probe_dataset);
      if (!m.dataset) throw ConfigError("unknown dataset '" + probe_dataset + "'");
      m.path = probe_data;
      const auto loaded = LoadEIDataset(m);
      std::optional<std::vector<EIVerdict>> verdicts;
      if (!probe_verdicts.empty()) {
        const auto by_id = ReadEIVerdicts(probe_verdicts);
        verdicts.emplace();
        for (const auto& r : loaded.records) {
          auto it = by_id.find(r.id);
          if (it == by_id.end()) throw ConfigError("no verdict for record " + r.id);
          verdicts->push_back(it->second);
        }
      }
      std::cout << RenderProbeReport(loaded.records, verdicts).text;
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
