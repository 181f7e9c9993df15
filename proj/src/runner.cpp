#include "fcjudge/runner.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fcjudge/metrics.hpp"
#include "fcjudge/text_util.hpp"

namespace fcjudge {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Share of valid choices in one slot at or beyond which a ranking run is
// flagged as possibly position-driven.
constexpr double kPositionBiasShare = 0.9;

template <typename Record>
std::vector<Record> Sample(std::vector<Record> records, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k >= records.size()) return records;
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<Record> out;
  out.reserve(k);
  for (auto i : idx) out.push_back(std::move(records[i]));
  return out;
}

json TraceJson(const ParseTrace& trace) {
  return {{"rule", trace.matched_rule},
          {"begin", trace.begin},
          {"end", trace.end},
          {"confidence", ToString(trace.confidence)}};
}

void WriteText(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string Num(double v) { return FormatDouble(v); }

// One unit of work per record, in record order across all manifests.
struct PlannedItem {
  std::size_t manifest_index = 0;
  std::string record_id;
  JudgeRequest request;
};

struct EIEntry {
  const DatasetManifest* manifest;
  std::vector<EIRecord> records;
};
struct RankEntry {
  const DatasetManifest* manifest;
  std::vector<RankingRecord> records;
  std::vector<SlotPosition> gold_slots;
};
struct RatingEntry {
  const DatasetManifest* manifest;
  std::vector<RatingRecord> records;
};

void AddCorrelation(MetricMap& metrics, const std::string& prefix, const std::vector<double>& judge,
                    const std::vector<double>& human) {
  metrics[prefix + ".n"] = std::to_string(judge.size());
  if (judge.size() < 2) return;
  auto put = [&](const char* name, auto fn) {
    try {
      metrics[prefix + "." + name] = Num(fn(judge, human));
    } catch (const InvalidInput& e) {
      spdlog::warn("{}.{} undefined: {}", prefix, name, e.what());
    }
  };
  put("pearson", [](const auto& x, const auto& y) { return Pearson(x, y); });
  put("spearman", [](const auto& x, const auto& y) { return Spearman(x, y); });
  put("kendall", [](const auto& x, const auto& y) { return KendallTau(x, y); });
}

}  // namespace

json ToJson(const RunConfig& c) {
  json manifests = json::array();
  for (const auto& m : c.manifests) {
    json entry = {{"name", m.name}, {"path", m.path}, {"split", ToString(m.split)}};
    if (m.dataset) entry["dataset"] = ToString(*m.dataset);
    if (m.expected_count) entry["expected_count"] = *m.expected_count;
    if (m.expected_positive_rate) entry["expected_positive_rate"] = *m.expected_positive_rate;
    if (m.scheme) entry["scheme"] = ToString(*m.scheme);
    manifests.push_back(entry);
  }
  const auto& b = c.backend;
  return {
      {"task", ToString(c.task)},
      {"manifest_path", c.manifest_path},
      {"manifests", manifests},
      {"backend",
       {{"kind", b.kind},
        {"model", b.model},
        {"temperature", b.temperature},
        {"max_output_tokens", b.max_output_tokens},
        {"max_in_flight", b.max_in_flight},
        {"cache_dir", b.cache_dir},
        {"resume", b.resume},
        {"mock_fixture", b.mock_fixture},
        {"mock_strict", b.mock_strict},
        {"base_url", b.live.base_url},
        {"endpoint_path", b.live.path},
        {"api_key_env", b.live.api_key_env},
        {"timeout_seconds", b.live.timeout_seconds},
        {"max_document_chars", b.max_document_chars},
        {"max_attempts", b.max_attempts},
        {"requests_per_second", b.requests_per_second}}},
      {"asset_dir", c.asset_dir},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
      {"paper_faithful_ordering", c.paper_faithful_ordering},
      {"positive_class", ToString(c.positive_class)},
      {"sample_size", c.sample_size},
      {"bootstrap_iterations", c.bootstrap_iterations},
      {"group_by_system", c.group_by_system},
  };
}

RunConfig RunConfigFromJson(const json& doc) {
  RunConfig c;
  const auto task = ParsePromptTask(doc.at("task").get<std::string>());
  if (!task) throw ConfigError("unknown task " + doc.at("task").dump());
  c.task = *task;
  c.manifest_path = doc.value("manifest_path", "");
  for (const auto& entry : doc.value("manifests", json::array())) {
    DatasetManifest m;
    m.name = entry.value("name", "");
    m.path = entry.at("path").get<std::string>();
    if (entry.contains("dataset")) m.dataset = ParseDataset(entry.at("dataset").get<std::string>());
    if (entry.contains("split")) m.split = ParseSplit(entry.at("split").get<std::string>()).value_or(Split::kTest);
    if (entry.contains("expected_count")) m.expected_count = entry.at("expected_count").get<std::size_t>();
    if (entry.contains("expected_positive_rate")) m.expected_positive_rate = entry.at("expected_positive_rate").get<double>();
    if (entry.contains("scheme")) m.scheme = ParseRatingScheme(entry.at("scheme").get<std::string>());
    c.manifests.push_back(std::move(m));
  }
  const auto& b = doc.at("backend");
  c.backend.kind = b.value("kind", "mock");
  c.backend.model = b.value("model", c.backend.model);
  c.backend.temperature = b.value("temperature", kDefaultTemperature);
  c.backend.max_output_tokens = b.value("max_output_tokens", kDefaultMaxOutputTokens);
  c.backend.max_in_flight = b.value("max_in_flight", std::size_t{4});
  c.backend.cache_dir = b.value("cache_dir", "");
  c.backend.resume = b.value("resume", false);
  c.backend.mock_fixture = b.value("mock_fixture", "");
  c.backend.mock_strict = b.value("mock_strict", true);
  c.backend.live.base_url = b.value("base_url", c.backend.live.base_url);
  c.backend.live.path = b.value("endpoint_path", c.backend.live.path);
  c.backend.live.api_key_env = b.value("api_key_env", c.backend.live.api_key_env);
  c.backend.live.timeout_seconds = b.value("timeout_seconds", c.backend.live.timeout_seconds);
  c.backend.max_document_chars = b.value("max_document_chars", c.backend.max_document_chars);
  c.backend.max_attempts = b.value("max_attempts", c.backend.max_attempts);
  c.backend.requests_per_second = b.value("requests_per_second", 0.0);
  c.asset_dir = doc.value("asset_dir", "");
  c.output_dir = doc.value("output_dir", "");
  c.seed = doc.value("seed", std::uint64_t{0});
  c.paper_faithful_ordering = doc.value("paper_faithful_ordering", false);
  c.positive_class = doc.value("positive_class", "inconsistent") == "consistent" ? ConsistencyLabel::kConsistent
                                                                                  : ConsistencyLabel::kInconsistent;
  c.sample_size = doc.value("sample_size", std::size_t{0});
  c.bootstrap_iterations = doc.value("bootstrap_iterations", std::size_t{0});
  c.group_by_system = doc.value("group_by_system", false);
  return c;
}

std::string SerializeMetrics(const MetricMap& metrics) {
  std::string out;
  for (const auto& [key, value] : metrics) out += key + "=" + value + "\n";
  return out;
}

MetricMap ParseMetrics(std::string_view text) {
  MetricMap out;
  for (std::string_view line : SplitLines(text)) {
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw std::runtime_error(fmt::format("bad metrics line: {}", line));
    out[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  return out;
}

MetricMap ReadMetricsFile(const std::string& path) { return ParseMetrics(ReadFile(path)); }

std::shared_ptr<ChatBackend> MakeBackend(const BackendSettings& settings) {
  if (settings.kind == "mock") {
    if (settings.mock_fixture.empty()) throw ConfigError("mock backend needs a fixture (--mock-fixture)");
    return std::make_shared<MockJudge>(MockJudge::FromFile(
        settings.mock_fixture,
        settings.mock_strict ? MockJudge::UnknownKeyPolicy::kError : MockJudge::UnknownKeyPolicy::kRefusal));
  }
  if (settings.kind == "live") return std::make_shared<ChatCompletionsBackend>(settings.live);
  throw ConfigError("unknown backend kind '" + settings.kind + "'");
}

RunArtifacts Run(const RunConfig& input_config, std::shared_ptr<ChatBackend> backend) {
  RunConfig config = input_config;
  if (config.output_dir.empty()) throw ConfigError("no output directory configured");
  if (config.backend.max_in_flight == 0) throw ConfigError("max_in_flight must be at least 1");
  if (config.manifests.empty()) {
    if (config.manifest_path.empty()) throw ConfigError("no manifest configured");
    config.manifests = LoadManifestFile(config.manifest_path);
  }
  if (config.manifests.empty()) throw ConfigError("manifest lists no datasets");
  const std::string asset_dir = config.asset_dir.empty() ? DefaultAssetDir() : config.asset_dir;
  const TemplateSet templates = TemplateSet::Load((fs::path(asset_dir) / "templates").string());
  const ResponseParser parser(Lexicon::Load((fs::path(asset_dir) / "lexicon").string()));

  // Phase 1: load and render everything. Any failure here aborts before a
  // backend exists.
  std::vector<EIEntry> ei_entries;
  std::vector<RankEntry> rank_entries;
  std::vector<RatingEntry> rating_entries;
  std::vector<PlannedItem> plan;
  json rejections = json::array();
  MetricMap metrics;

  auto make_request = [&](RenderedPrompt prompt, bool truncated) {
    JudgeRequest req = MakeJudgeRequest(config.backend.model, std::move(prompt), config.backend.temperature,
                                        config.backend.max_output_tokens);
    req.input_truncated = truncated;
    return req;
  };
  auto note_rejections = [&](const DatasetManifest& m, const std::vector<Rejection>& rejected) {
    metrics["data." + m.name + ".rejected"] = std::to_string(rejected.size());
    for (const auto& r : rejected) {
      rejections.push_back({{"dataset", m.name}, {"line", r.line}, {"id", r.id}, {"reason", r.reason}});
    }
  };

  const bool ei_task = config.task == PromptTask::kEIZeroShot || config.task == PromptTask::kEIChainOfThought;
  for (std::size_t mi = 0; mi < config.manifests.size(); ++mi) {
    const auto& m = config.manifests[mi];
    if (ei_task) {
      auto loaded = LoadEIDataset(m);
      note_rejections(m, loaded.rejections);
      EIEntry entry{&m, Sample(std::move(loaded.records), config.sample_size, config.seed)};
      for (const auto& r : entry.records) {
        auto doc = TruncateDocument(r.document, config.backend.max_document_chars);
        auto prompt = config.task == PromptTask::kEIZeroShot ? RenderEIZeroShot(templates, doc.text, r.summary)
                                                             : RenderEIChainOfThought(templates, doc.text, r.summary);
        prompt.input_ids = {r.id};
        plan.push_back({mi, r.id, make_request(std::move(prompt), doc.truncated)});
      }
      ei_entries.push_back(std::move(entry));
    } else if (config.task == PromptTask::kRanking) {
      auto loaded = LoadRankingDataset(m.path);
      note_rejections(m, loaded.rejections);
      if (m.expected_count && loaded.records.size() != *m.expected_count) {
        throw DatasetError(fmt::format("{}: expected {} records, loaded {}", m.name, *m.expected_count,
                                       loaded.records.size()));
      }
      RankEntry entry{&m, Sample(std::move(loaded.records), config.sample_size, config.seed), {}};
      for (const auto& r : entry.records) {
        RankingRecord shortened = r;
        auto doc = TruncateDocument(r.article, config.backend.max_document_chars);
        shortened.article = doc.text;
        auto rendered = RenderRankingRecord(templates, shortened, config.paper_faithful_ordering);
        entry.gold_slots.push_back(rendered.gold_slot);
        plan.push_back({mi, r.id, make_request(std::move(rendered.prompt), doc.truncated)});
      }
      rank_entries.push_back(std::move(entry));
    } else {
      if (!m.scheme) throw ConfigError(fmt::format("rating manifest entry '{}' needs a 'scheme'", m.name));
      auto loaded = LoadRatingDataset(m.path, *m.scheme);
      note_rejections(m, loaded.rejections);
      if (m.expected_count && loaded.records.size() != *m.expected_count) {
        throw DatasetError(fmt::format("{}: expected {} records, loaded {}", m.name, *m.expected_count,
                                       loaded.records.size()));
      }
      RatingEntry entry{&m, Sample(std::move(loaded.records), config.sample_size, config.seed)};
      for (const auto& r : entry.records) {
        auto doc = TruncateDocument(r.document, config.backend.max_document_chars);
        auto prompt = RenderRating(templates, doc.text, r.summary);
        prompt.input_ids = {r.id};
        plan.push_back({mi, r.id, make_request(std::move(prompt), doc.truncated)});
      }
      rating_entries.push_back(std::move(entry));
    }
  }

  // Phase 2: query.
  if (!backend) backend = MakeBackend(config.backend);
  fs::create_directories(config.output_dir);
  const std::string cache_dir =
      config.backend.cache_dir.empty() ? (fs::path(config.output_dir) / "cache").string() : config.backend.cache_dir;
  auto cache = std::make_shared<ResponseCache>(cache_dir, config.backend.resume);
  JudgeClientOptions options;
  options.retry.max_attempts = config.backend.max_attempts;
  options.requests_per_second = config.backend.requests_per_second;
  JudgeClient client(backend, cache, options);

  std::vector<JudgeRequest> requests;
  requests.reserve(plan.size());
  for (const auto& item : plan) requests.push_back(item.request);
  spdlog::info("submitting {} requests to {} backend (max in flight {})", requests.size(), backend->Name(),
               config.backend.max_in_flight);
  BatchResult batch = client.RunBatch(requests, config.backend.max_in_flight);

  // Phase 3: parse and score.
  RunArtifacts artifacts;
  artifacts.output_dir = config.output_dir;
  artifacts.batch = batch.summary;
  std::string verdict_log;
  auto log_line = [&](json line) { verdict_log += line.dump() + "\n"; };

  metrics["run.task"] = ToString(config.task);
  metrics["run.model"] = config.backend.model;
  metrics["run.records"] = std::to_string(plan.size());
  metrics["run.transport_errors"] = std::to_string(batch.summary.transport_errors);
  metrics["run.refused"] = std::to_string(batch.summary.refused);
  metrics["run.truncated_outputs"] = std::to_string(batch.summary.truncated);
  metrics["run.lexicon_version"] = parser.lexicon().version;
  metrics["run.template_version"] = templates.version();

  std::size_t cursor = 0;
  auto base_line = [&](std::size_t i) {
    const auto& item = plan[i];
    const auto& resp = batch.responses[i];
    return json{{"id", item.record_id},
                {"dataset", config.manifests[item.manifest_index].name},
                {"task", ToString(config.task)},
                {"prompt_sha256", item.request.prompt.Checksum()},
                {"request_key", item.request.request_key},
                {"finish_state", ToString(resp.finish_state)},
                {"input_truncated", item.request.input_truncated}};
  };

  const ParseMode mode = config.task == PromptTask::kEIChainOfThought ? ParseMode::kChainOfThought : ParseMode::kZeroShot;
  for (const auto& entry : ei_entries) {
    const std::string prefix = "ei." + entry.manifest->name;
    std::vector<EIVerdict> verdicts;
    std::vector<ConsistencyLabel> golds;
    std::size_t unparseable = 0, hedged = 0, undetermined = 0, transport = 0, input_truncated = 0;
    for (const auto& record : entry.records) {
      const std::size_t i = cursor++;
      const auto& resp = batch.responses[i];
      json line = base_line(i);
      line["gold"] = ToString(record.gold);
      input_truncated += plan[i].request.input_truncated;
      if (resp.finish_state == FinishState::kTransportError) {
        ++transport;
        line["verdict"] = nullptr;
        line["error"] = resp.error;
        log_line(std::move(line));
        continue;
      }
      const auto parsed = parser.ParseEI(resp.raw_text, mode);
      unparseable += parsed.verdict.value == EIVerdictValue::kUnparseable;
      hedged += parsed.trace.matched_rule == "hedge";
      undetermined += parsed.trace.matched_rule == "undetermined";
      line["verdict"] = ToString(parsed.verdict.value);
      line["trace"] = TraceJson(parsed.trace);
      log_line(std::move(line));
      verdicts.push_back(parsed.verdict);
      golds.push_back(record.gold);
    }
    metrics[prefix + ".dataset"] = entry.manifest->dataset ? std::string(ToString(*entry.manifest->dataset)) : "";
    metrics[prefix + ".split"] = ToString(entry.manifest->split);
    metrics[prefix + ".n"] = std::to_string(verdicts.size());
    metrics[prefix + ".unparseable"] = std::to_string(unparseable);
    metrics[prefix + ".hedged"] = std::to_string(hedged);
    metrics[prefix + ".undetermined"] = std::to_string(undetermined);
    metrics[prefix + ".transport_errors"] = std::to_string(transport);
    metrics[prefix + ".input_truncated"] = std::to_string(input_truncated);
    metrics[prefix + ".positive_class"] = ToString(config.positive_class);
    const auto cm = BuildConfusion(verdicts, golds, config.positive_class);
    metrics[prefix + ".tp"] = std::to_string(cm.tp);
    metrics[prefix + ".fp"] = std::to_string(cm.fp);
    metrics[prefix + ".tn"] = std::to_string(cm.tn);
    metrics[prefix + ".fn"] = std::to_string(cm.fn);
    try {
      metrics[prefix + ".sensitivity"] = Num(Sensitivity(cm));
    } catch (const InvalidInput& e) {
      spdlog::warn("{}: {}", prefix, e.what());
    }
    try {
      metrics[prefix + ".specificity"] = Num(Specificity(cm));
    } catch (const InvalidInput& e) {
      spdlog::warn("{}: {}", prefix, e.what());
    }
    if (metrics.contains(prefix + ".sensitivity") && metrics.contains(prefix + ".specificity")) {
      metrics[prefix + ".bacc"] = Num(BalancedAccuracy(cm));
      if (config.bootstrap_iterations > 0) {
        std::vector<std::pair<ConsistencyLabel, ConsistencyLabel>> pairs;
        for (std::size_t k = 0; k < golds.size(); ++k) pairs.emplace_back(verdicts[k].ScoredLabel(), golds[k]);
        using Pair = std::pair<ConsistencyLabel, ConsistencyLabel>;
        const std::function<double(std::span<const Pair>)> statistic = [&](std::span<const Pair> sample) {
          std::vector<ConsistencyLabel> p, g;
          for (const auto& [pred, gold] : sample) {
            p.push_back(pred);
            g.push_back(gold);
          }
          return BalancedAccuracy(BuildConfusion(p, g, config.positive_class));
        };
        const auto ci = BootstrapInterval<Pair>(pairs, statistic, config.bootstrap_iterations, config.seed);
        metrics[prefix + ".bacc_ci_low"] = Num(ci.low);
        metrics[prefix + ".bacc_ci_high"] = Num(ci.high);
      }
    }
  }

  for (const auto& entry : rank_entries) {
    const std::string prefix = "ranking." + entry.manifest->name;
    std::vector<RankChoice> choices;
    std::vector<SlotPosition> golds;
    std::size_t invalid = 0, chose_a = 0, gold_a = 0, transport = 0;
    for (std::size_t k = 0; k < entry.records.size(); ++k) {
      const std::size_t i = cursor++;
      const auto& resp = batch.responses[i];
      json line = base_line(i);
      line["gold_slot"] = ToString(entry.gold_slots[k]);
      if (resp.finish_state == FinishState::kTransportError) {
        ++transport;
        line["verdict"] = nullptr;
        line["error"] = resp.error;
        log_line(std::move(line));
        continue;
      }
      const auto parsed = parser.ParseRank(resp.raw_text);
      line["verdict"] = ToString(parsed.choice);
      line["trace"] = TraceJson(parsed.trace);
      log_line(std::move(line));
      choices.push_back(parsed.choice);
      golds.push_back(entry.gold_slots[k]);
      invalid += parsed.choice == RankChoice::kInvalid;
      chose_a += parsed.choice == RankChoice::kA;
      gold_a += entry.gold_slots[k] == SlotPosition::kA;
    }
    metrics[prefix + ".n"] = std::to_string(choices.size());
    metrics[prefix + ".invalid"] = std::to_string(invalid);
    metrics[prefix + ".transport_errors"] = std::to_string(transport);
    metrics[prefix + ".ordering"] = config.paper_faithful_ordering ? "fixed" : "balanced";
    if (!choices.empty()) {
      metrics[prefix + ".accuracy"] = Num(RankingAccuracy(choices, golds));
      metrics[prefix + ".gold_a_rate"] = Num(static_cast<double>(gold_a) / static_cast<double>(choices.size()));
    }
    const std::size_t valid = choices.size() - invalid;
    bool warn = false;
    if (valid > 0) {
      const double a_rate = static_cast<double>(chose_a) / static_cast<double>(valid);
      metrics[prefix + ".a_choice_rate"] = Num(a_rate);
      warn = a_rate >= kPositionBiasShare || a_rate <= 1.0 - kPositionBiasShare;
    }
    metrics[prefix + ".position_bias_warning"] = warn ? "1" : "0";
    if (warn) {
      artifacts.position_bias_warning = true;
      spdlog::warn("{}: judge picked one slot for at least {:.0f}% of valid answers{}", prefix,
                   kPositionBiasShare * 100,
                   config.paper_faithful_ordering ? "; with fixed ordering the gold is always in slot A, so "
                                                    "accuracy cannot be told apart from position preference"
                                                  : "");
    }
  }

  for (const auto& entry : rating_entries) {
    const std::string prefix = "rating." + entry.manifest->name;
    std::vector<double> judge_all, human_all;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_group;
    std::size_t no_number = 0, out_of_range = 0, transport = 0;
    for (const auto& record : entry.records) {
      const std::size_t i = cursor++;
      const auto& resp = batch.responses[i];
      json line = base_line(i);
      line["human_score"] = record.human_score;
      if (record.origin) line["origin"] = ToString(*record.origin);
      if (resp.finish_state == FinishState::kTransportError) {
        ++transport;
        line["verdict"] = nullptr;
        line["error"] = resp.error;
        log_line(std::move(line));
        continue;
      }
      const auto parsed = parser.ParseRating(resp.raw_text);
      line["verdict"] = parsed.verdict.score ? json(*parsed.verdict.score) : json(nullptr);
      line["in_range"] = parsed.verdict.in_range;
      line["trace"] = TraceJson(parsed.trace);
      log_line(std::move(line));
      if (!parsed.verdict.score) {
        ++no_number;
        continue;
      }
      if (!parsed.verdict.in_range) {
        ++out_of_range;
        continue;
      }
      judge_all.push_back(*parsed.verdict.score);
      human_all.push_back(record.human_score);
      if (record.origin) {
        auto& group = by_group[std::string(ToString(*record.origin))];
        group.first.push_back(*parsed.verdict.score);
        group.second.push_back(record.human_score);
      }
      if (config.group_by_system && record.system) {
        auto& group = by_group["system." + *record.system];
        group.first.push_back(*parsed.verdict.score);
        group.second.push_back(record.human_score);
      }
    }
    metrics[prefix + ".dataset"] = entry.manifest->dataset ? std::string(ToString(*entry.manifest->dataset)) : "";
    metrics[prefix + ".excluded_no_number"] = std::to_string(no_number);
    metrics[prefix + ".excluded_out_of_range"] = std::to_string(out_of_range);
    metrics[prefix + ".transport_errors"] = std::to_string(transport);
    AddCorrelation(metrics, prefix + ".all", judge_all, human_all);
    for (const auto& [group, values] : by_group) {
      AddCorrelation(metrics, prefix + "." + group, values.first, values.second);
    }
  }

  artifacts.metrics = metrics;
  const fs::path out(config.output_dir);
  WriteText(out / "config.json", ToJson(config).dump(2) + "\n");
  WriteText(out / "verdicts.jsonl", verdict_log);
  WriteText(out / "metrics.txt", SerializeMetrics(metrics));
  std::string rejection_log;
  for (const auto& r : rejections) rejection_log += r.dump() + "\n";
  WriteText(out / "rejections.jsonl", rejection_log);

  const auto report = RenderReport({metrics}, ReferenceResults::Load(asset_dir));
  WriteText(out / "report.txt", report.text);
  WriteText(out / "report.tsv", report.tsv);
  WriteText(out / "summary.json", report.summary.dump(2) + "\n");
  return artifacts;
}

std::map<std::string, EIVerdict> ReadEIVerdicts(const std::string& path) {
  std::map<std::string, EIVerdict> out;
  const std::string content = ReadFile(path);
  for (std::string_view line : SplitLines(content)) {
    if (Trim(line).empty()) continue;
    const auto entry = json::parse(line);
    if (!entry.contains("verdict") || !entry.at("verdict").is_string()) continue;
    const std::string v = entry.at("verdict").get<std::string>();
    EIVerdict verdict;
    verdict.value = v == "consistent"     ? EIVerdictValue::kConsistent
                    : v == "inconsistent" ? EIVerdictValue::kInconsistent
                                          : EIVerdictValue::kUnparseable;
    out[entry.at("id").get<std::string>()] = verdict;
  }
  return out;
}

}  // namespace fcjudge
