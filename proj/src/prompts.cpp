#include "fcjudge/prompts.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fcjudge/text_util.hpp"

#ifndef FCJUDGE_DEFAULT_ASSET_DIR
#define FCJUDGE_DEFAULT_ASSET_DIR "assets"
#endif

namespace fcjudge {

std::string_view ToString(PromptTask task) {
  switch (task) {
    case PromptTask::kEIZeroShot: return "ei_zs";
    case PromptTask::kEIChainOfThought: return "ei_cot";
    case PromptTask::kRanking: return "ranking";
    case PromptTask::kRating: return "rating";
  }
  return "unknown";
}

std::optional<PromptTask> ParsePromptTask(std::string_view text) {
  const std::string key = AsciiLower(Trim(text));
  if (key == "ei_zs" || key == "ei-zs" || key == "zs") return PromptTask::kEIZeroShot;
  if (key == "ei_cot" || key == "ei-cot" || key == "cot") return PromptTask::kEIChainOfThought;
  if (key == "ranking" || key == "rank") return PromptTask::kRanking;
  if (key == "rating" || key == "rate") return PromptTask::kRating;
  return std::nullopt;
}

std::string RenderedPrompt::BlankedBody() const {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& slot : slots) {
    out.append(body, cursor, slot.offset - cursor);
    out += "{{" + slot.name + "}}";
    cursor = slot.offset + slot.length;
  }
  out.append(body, cursor, std::string::npos);
  return out;
}

std::string RenderedPrompt::Checksum() const { return Sha256Hex(body); }

PromptTemplate::PromptTemplate(PromptTask task, std::string file_text)
    : task_(task), checksum_(Sha256Hex(file_text)) {
  text_ = std::move(file_text);
  if (!text_.empty() && text_.back() == '\n') text_.pop_back();

  std::size_t cursor = 0;
  while (true) {
    const auto open = text_.find("{{", cursor);
    if (open == std::string::npos) {
      pieces_.push_back({text_.substr(cursor), {}});
      break;
    }
    const auto close = text_.find("}}", open + 2);
    if (close == std::string::npos) {
      throw std::runtime_error(fmt::format("unterminated marker in {} template", ToString(task)));
    }
    std::string name = text_.substr(open + 2, close - open - 2);
    if (name.empty()) throw std::runtime_error("empty marker name in template");
    pieces_.push_back({text_.substr(cursor, open - cursor), name});
    slot_names_.push_back(std::move(name));
    cursor = close + 2;
  }
}

RenderedPrompt PromptTemplate::Render(const std::map<std::string, std::string_view>& values,
                                      std::vector<std::string> input_ids) const {
  const std::set<std::string> known(slot_names_.begin(), slot_names_.end());
  for (const auto& [name, value] : values) {
    if (!known.contains(name)) {
      throw InvalidInput(fmt::format("{} template has no slot '{}'", ToString(task_), name));
    }
    if (!HasContent(value)) throw InvalidInput(fmt::format("input for slot '{}' is empty", name));
  }

  RenderedPrompt out;
  out.task = task_;
  out.input_ids = std::move(input_ids);
  out.template_checksum = checksum_;
  for (const auto& piece : pieces_) {
    out.body += piece.literal;
    if (piece.slot.empty()) continue;
    auto it = values.find(piece.slot);
    if (it == values.end()) throw InvalidInput(fmt::format("missing input for slot '{}'", piece.slot));
    out.slots.push_back({piece.slot, out.body.size(), it->second.size()});
    out.body += it->second;
  }
  out.placeholders_filled = true;
  return out;
}

std::string DefaultAssetDir() {
  if (const char* env = std::getenv("FCJUDGE_ASSET_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return FCJUDGE_DEFAULT_ASSET_DIR;
}

TemplateSet TemplateSet::Load(const std::string& template_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(template_dir);
  const auto manifest = nlohmann::json::parse(ReadFile((dir / "checksums.json").string()));
  const auto& sums = manifest.at("sha256");

  TemplateSet set;
  set.version_ = manifest.value("version", "unversioned");
  for (PromptTask task : kAllPromptTasks) {
    const std::string name(ToString(task));
    std::string text = ReadFile((dir / (name + ".txt")).string());
    const std::string actual = Sha256Hex(text);
    const std::string expected = sums.at(name).get<std::string>();
    if (actual != expected) {
      throw std::runtime_error(
          fmt::format("template {} checksum mismatch: expected {}, got {}", name, expected, actual));
    }
    set.templates_.emplace_back(task, std::move(text));
  }
  return set;
}

TemplateSet TemplateSet::LoadDefault() {
  return Load((std::filesystem::path(DefaultAssetDir()) / "templates").string());
}

const PromptTemplate& TemplateSet::Get(PromptTask task) const {
  for (const auto& t : templates_) {
    if (t.task() == task) return t;
  }
  throw std::out_of_range(fmt::format("template {} not loaded", ToString(task)));
}

RenderedPrompt RenderEIZeroShot(const TemplateSet& templates, std::string_view document,
                                std::string_view summary) {
  return templates.Get(PromptTask::kEIZeroShot).Render({{"article", document}, {"summary", summary}});
}

RenderedPrompt RenderEIChainOfThought(const TemplateSet& templates, std::string_view document,
                                      std::string_view summary) {
  return templates.Get(PromptTask::kEIChainOfThought)
      .Render({{"article", document}, {"summary", summary}});
}

RenderedPrompt RenderRanking(const TemplateSet& templates, std::string_view article,
                             std::string_view candidate_a, std::string_view candidate_b) {
  if (candidate_a == candidate_b) throw InvalidInput("ranking candidates are identical");
  return templates.Get(PromptTask::kRanking)
      .Render({{"article", article}, {"summary_a", candidate_a}, {"summary_b", candidate_b}});
}

RenderedPrompt RenderRating(const TemplateSet& templates, std::string_view document,
                            std::string_view summary) {
  return templates.Get(PromptTask::kRating).Render({{"article", document}, {"summary", summary}});
}

SlotPosition GoldSlotFor(std::string_view record_id, bool paper_faithful_ordering) {
  if (paper_faithful_ordering) return SlotPosition::kA;
  const std::string digest = Sha256Hex(record_id);
  // Low bit of the last hex digit.
  const char last = digest.back();
  const int nibble = last <= '9' ? last - '0' : last - 'a' + 10;
  return (nibble & 1) == 0 ? SlotPosition::kA : SlotPosition::kB;
}

RankingPrompt RenderRankingRecord(const TemplateSet& templates, const RankingRecord& record,
                                  bool paper_faithful_ordering) {
  RankingPrompt out;
  out.gold_slot = GoldSlotFor(record.id, paper_faithful_ordering);
  const bool gold_first = out.gold_slot == SlotPosition::kA;
  out.prompt = RenderRanking(templates, record.article,
                             gold_first ? record.consistent_summary : record.inconsistent_summary,
                             gold_first ? record.inconsistent_summary : record.consistent_summary);
  out.prompt.input_ids = {record.id};
  return out;
}

}  // namespace fcjudge
