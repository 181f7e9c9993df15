#include "fcjudge/datasets.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fcjudge/text_util.hpp"

namespace fcjudge {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Thrown inside a line handler; converted to a Rejection by ForEachLine.
struct LineError {
  std::string id;
  std::string reason;
};

std::string RequireString(const json& object, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (auto it = object.find(key); it != object.end()) {
      if (!it->is_string()) throw LineError{{}, fmt::format("field '{}' is not a string", key)};
      return it->get<std::string>();
    }
  }
  throw LineError{{}, fmt::format("missing field '{}'", *keys.begin())};
}

std::string IdOrDefault(const json& object, std::size_t line) {
  if (auto it = object.find("id"); it != object.end()) {
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
  }
  return fmt::format("line-{}", line);
}

std::optional<Origin> OptionalOrigin(const json& object) {
  auto it = object.find("origin");
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw LineError{{}, "field 'origin' is not a string"};
  auto origin = ParseOrigin(it->get<std::string>());
  if (!origin) throw LineError{{}, fmt::format("unknown origin '{}'", it->get<std::string>())};
  return origin;
}

ConsistencyLabel ParseLabel(const json& value) {
  if (value.is_number_integer()) {
    const auto v = value.get<long long>();
    if (v == 1) return ConsistencyLabel::kConsistent;
    if (v == 0) return ConsistencyLabel::kInconsistent;
    throw LineError{{}, fmt::format("unknown label {}", v)};
  }
  if (value.is_string()) {
    const std::string key = AsciiLower(Trim(value.get<std::string>()));
    if (key == "consistent" || key == "correct" || key == "1") return ConsistencyLabel::kConsistent;
    if (key == "inconsistent" || key == "incorrect" || key == "0") {
      return ConsistencyLabel::kInconsistent;
    }
    throw LineError{{}, fmt::format("unknown label '{}'", value.get<std::string>())};
  }
  throw LineError{{}, "label must be a string or 0/1"};
}

// Calls handler(json, line_number) for each non-blank line. Handler
// failures become rejections; the read itself never stops early.
template <typename Record, typename Handler>
LoadResult<Record> ForEachLine(const std::string& path, Handler handler) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset file: " + path);
  LoadResult<Record> result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      result.rejections.push_back({line_number, {}, fmt::format("malformed line: {}", e.what())});
      continue;
    }
    if (!object.is_object()) {
      result.rejections.push_back({line_number, {}, "malformed line: not a JSON object"});
      continue;
    }
    const std::string id = IdOrDefault(object, line_number);
    try {
      Record record = handler(object, line_number);
      if (auto reason = ValidateRecord(record)) {
        result.rejections.push_back({line_number, record.id, *reason});
        continue;
      }
      result.records.push_back(std::move(record));
    } catch (const LineError& e) {
      result.rejections.push_back({line_number, id, e.reason});
    } catch (const InvalidInput& e) {
      result.rejections.push_back({line_number, id, e.what()});
    } catch (const json::exception& e) {
      result.rejections.push_back({line_number, id, e.what()});
    }
  }
  for (const auto& r : result.rejections) {
    spdlog::warn("{}:{}: rejected record '{}': {}", path, r.line, r.id, r.reason);
  }
  return result;
}

}  // namespace

const BenchmarkStats& StatsFor(Dataset dataset) {
  for (const auto& stats : kBenchmarkStats) {
    if (stats.dataset == dataset) return stats;
  }
  throw InvalidInput("no benchmark statistics for dataset");
}

std::vector<DatasetManifest> LoadManifestFile(const std::string& path) {
  json doc;
  try {
    doc = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw DatasetError(fmt::format("manifest {} is not valid JSON: {}", path, e.what()));
  } catch (const std::runtime_error& e) {
    throw DatasetError(e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  const json& entries = doc.contains("datasets") ? doc.at("datasets") : doc;
  if (!entries.is_array()) throw DatasetError("manifest must hold a 'datasets' array");

  std::vector<DatasetManifest> out;
  for (const auto& entry : entries) {
    DatasetManifest m;
    if (!entry.contains("path")) throw DatasetError("manifest entry without 'path'");
    fs::path p = entry.at("path").get<std::string>();
    m.path = p.is_absolute() ? p.string() : (base / p).lexically_normal().string();
    if (entry.contains("dataset")) {
      const auto name = entry.at("dataset").get<std::string>();
      m.dataset = ParseDataset(name);
      m.name = name;
    }
    if (entry.contains("split")) {
      const auto split = ParseSplit(entry.at("split").get<std::string>());
      if (!split) throw DatasetError("unknown split in manifest: " + entry.at("split").dump());
      m.split = *split;
    }
    if (entry.contains("scheme")) {
      m.scheme = ParseRatingScheme(entry.at("scheme").get<std::string>());
      if (!m.scheme) throw DatasetError("unknown scheme in manifest: " + entry.at("scheme").dump());
    }
    if (entry.contains("expected_count")) m.expected_count = entry.at("expected_count").get<std::size_t>();
    if (entry.contains("expected_positive_rate")) {
      m.expected_positive_rate = entry.at("expected_positive_rate").get<double>();
    }
    if (entry.contains("name")) m.name = entry.at("name").get<std::string>();
    if (m.name.empty()) m.name = fs::path(m.path).stem().string();
    out.push_back(std::move(m));
  }
  return out;
}

LoadResult<EIRecord> LoadEIDataset(const DatasetManifest& manifest) {
  if (!manifest.dataset) {
    throw DatasetError(fmt::format("manifest entry '{}' does not name an entailment dataset",
                                   manifest.name));
  }
  auto result = ForEachLine<EIRecord>(manifest.path, [&](const json& object, std::size_t line) {
    EIRecord record;
    record.id = IdOrDefault(object, line);
    try {
      record.document = RequireString(object, {"document"});
      record.summary = RequireString(object, {"claim", "summary"});
      if (!object.contains("label")) throw LineError{{}, "missing field 'label'"};
      record.gold = ParseLabel(object.at("label"));
      record.origin = OptionalOrigin(object);
    } catch (LineError& e) {
      e.id = record.id;
      throw;
    }
    record.dataset = *manifest.dataset;
    record.split = manifest.split;
    return record;
  });

  const auto& records = result.records;
  if (manifest.expected_count && records.size() != *manifest.expected_count) {
    throw DatasetError(fmt::format("{}: expected {} records, loaded {}", manifest.name,
                                   *manifest.expected_count, records.size()));
  }
  if (manifest.expected_positive_rate && !records.empty()) {
    const double rate = ConsistentRate(records);
    if (std::abs(rate - *manifest.expected_positive_rate) > kPositiveRateTolerance + 1e-12) {
      throw DatasetError(fmt::format("{}: expected consistent rate {:.4f}, loaded {:.4f}",
                                     manifest.name, *manifest.expected_positive_rate, rate));
    }
  }
  return result;
}

LoadResult<RankingRecord> LoadRankingDataset(const std::string& path) {
  return ForEachLine<RankingRecord>(path, [](const json& object, std::size_t line) {
    RankingRecord record;
    record.id = IdOrDefault(object, line);
    try {
      record.article = RequireString(object, {"article", "article_sent"});
      record.consistent_summary = RequireString(object, {"correct_sent"});
      record.inconsistent_summary = RequireString(object, {"incorrect_sent"});
    } catch (LineError& e) {
      e.id = record.id;
      throw;
    }
    return record;
  });
}

LoadResult<RatingRecord> LoadRatingDataset(const std::string& path, RatingScheme scheme) {
  return ForEachLine<RatingRecord>(path, [&](const json& object, std::size_t line) {
    RatingRecord record;
    record.id = IdOrDefault(object, line);
    record.scheme = scheme;
    try {
      record.document = RequireString(object, {"document", "article"});
      record.summary = RequireString(object, {"summary"});
      record.origin = OptionalOrigin(object);
      for (const char* key : {"system", "model_id"}) {
        if (object.contains(key) && object.at(key).is_string()) {
          record.system = object.at(key).get<std::string>();
          break;
        }
      }
    } catch (LineError& e) {
      e.id = record.id;
      throw;
    }
    if (scheme == RatingScheme::kSummEvalLikert5) {
      if (!object.contains("annotations") || !object.at("annotations").is_array()) {
        throw LineError{record.id, "missing 'annotations' list"};
      }
      record.raw_annotations = object.at("annotations").get<std::vector<double>>();
      if (record.raw_annotations.size() != kSummEvalExpertCount) {
        spdlog::warn("{}:{}: record '{}' has {} annotations, expected {}; averaging available values",
                     path, line, record.id, record.raw_annotations.size(), kSummEvalExpertCount);
      }
    } else {
      if (!object.contains("score") || !object.at("score").is_number()) {
        throw LineError{record.id, "missing numeric 'score'"};
      }
      record.raw_annotations = {object.at("score").get<double>()};
    }
    record.human_score = NormalizeRating(record.raw_annotations, scheme);
    return record;
  });
}

double ConsistentRate(std::span<const EIRecord> records) {
  if (records.empty()) return 0.0;
  std::size_t consistent = 0;
  for (const auto& r : records) consistent += r.gold == ConsistencyLabel::kConsistent;
  return static_cast<double>(consistent) / static_cast<double>(records.size());
}

}  // namespace fcjudge
