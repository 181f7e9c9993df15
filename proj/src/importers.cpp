#include <cctype>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fcjudge/runner.hpp"
#include "fcjudge/text_util.hpp"

namespace fcjudge {
namespace {

using json = nlohmann::json;

// Upstream files come either as one JSON array or as one object per line.
std::vector<json> ReadObjects(const std::string& path) {
  const std::string text = ReadFile(path);
  const auto first = Trim(text);
  if (!first.empty() && first.front() == '[') return json::parse(text).get<std::vector<json>>();
  std::vector<json> out;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      spdlog::warn("{}:{}: skipped malformed line ({})", path, line_no, e.what());
    }
  }
  return out;
}

std::string IdFor(const json& object, std::size_t index, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = object.find(key);
    if (it == object.end()) continue;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
  }
  return fmt::format("rec-{}", index);
}

bool AllDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::optional<json> ConvertSummac(const json& in, std::size_t index) {
  json out = {{"id", IdFor(in, index, {"id"})},
              {"document", in.at("document").get<std::string>()},
              {"claim", in.at("claim").get<std::string>()},
              {"label", in.at("label")}};
  if (in.contains("origin") && in.at("origin").is_string()) out["origin"] = in.at("origin");
  return out;
}

std::optional<json> ConvertSummEval(const json& in, std::size_t index) {
  std::vector<double> annotations;
  for (const auto& a : in.at("expert_annotations")) annotations.push_back(a.at("consistency").get<double>());
  json out = {{"id", IdFor(in, index, {"id"}) + "/" + in.value("model_id", "unknown")},
              {"document", in.at("text").get<std::string>()},
              {"summary", in.at("decoded").get<std::string>()},
              {"annotations", annotations},
              {"origin", "cnndm"}};
  if (in.contains("model_id")) out["system"] = in.at("model_id");
  return out;
}

// FRANK ids are CNN/DM hex hashes or numeric XSum BBC ids.
std::optional<json> ConvertFrank(const json& in, std::size_t index) {
  const std::string hash = IdFor(in, index, {"hash", "id"});
  const std::string system = in.value("model_name", "unknown");
  json out = {{"id", hash + "/" + system},
              {"document", in.at("article").get<std::string>()},
              {"summary", in.at("summary").get<std::string>()},
              {"score", in.at("Factuality").get<double>()},
              {"origin", AllDigits(hash) ? "xsum" : "cnndm"},
              {"system", system}};
  return out;
}

std::optional<json> ConvertRanking(const json& in, std::size_t index) {
  return json{{"id", IdFor(in, index, {"id"})},
              {"article", in.at("article_sent").get<std::string>()},
              {"correct_sent", in.at("correct_sent").get<std::string>()},
              {"incorrect_sent", in.at("incorrect_sent").get<std::string>()}};
}

}  // namespace

std::optional<ImportFormat> ParseImportFormat(std::string_view text) {
  const std::string key = AsciiLower(Trim(text));
  if (key == "summac") return ImportFormat::kSummac;
  if (key == "summeval") return ImportFormat::kSummEval;
  if (key == "frank") return ImportFormat::kFrank;
  if (key == "ranking") return ImportFormat::kRanking;
  return std::nullopt;
}

std::size_t ImportDataset(ImportFormat format, const std::string& input, const std::string& output) {
  const auto objects = ReadObjects(input);
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + output);
  std::size_t written = 0;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    std::optional<json> converted;
    try {
      switch (format) {
        case ImportFormat::kSummac: converted = ConvertSummac(objects[i], i); break;
        case ImportFormat::kSummEval: converted = ConvertSummEval(objects[i], i); break;
        case ImportFormat::kFrank: converted = ConvertFrank(objects[i], i); break;
        case ImportFormat::kRanking: converted = ConvertRanking(objects[i], i); break;
      }
    } catch (const json::exception& e) {
      spdlog::warn("{}: record {} skipped ({})", input, i + 1, e.what());
      continue;
    }
    out << converted->dump() << '\n';
    ++written;
  }
  return written;
}

}  // namespace fcjudge
