// Prompt rendering for the four judging tasks.
//
// Templates are plain UTF-8 asset files with `{{name}}` markers and a
// checksum manifest. Rendering is a single left-to-right pass over the
// template: inserted inputs are never scanned again, so marker-like text
// inside a document survives verbatim.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fcjudge/core_model.hpp"

namespace fcjudge {

enum class PromptTask { kEIZeroShot, kEIChainOfThought, kRanking, kRating };

inline constexpr PromptTask kAllPromptTasks[] = {PromptTask::kEIZeroShot,
                                                 PromptTask::kEIChainOfThought,
                                                 PromptTask::kRanking, PromptTask::kRating};

std::string_view ToString(PromptTask task);
std::optional<PromptTask> ParsePromptTask(std::string_view text);

/// Where one input landed inside a rendered body.
struct SlotSpan {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct RenderedPrompt {
  PromptTask task = PromptTask::kEIZeroShot;
  std::string body;
  bool placeholders_filled = false;
  std::vector<std::string> input_ids;
  std::vector<SlotSpan> slots;  // in body order
  std::string template_checksum;

  /// Body with every filled slot replaced by its `{{name}}` marker again.
  std::string BlankedBody() const;
  /// SHA-256 of the body, recorded in verdict logs.
  std::string Checksum() const;
};

class PromptTemplate {
 public:
  /// `file_text` is the asset file content; its checksum is kept as-is.
  PromptTemplate(PromptTask task, std::string file_text);

  PromptTask task() const { return task_; }
  /// Template text as stored, minus one trailing newline.
  const std::string& text() const { return text_; }
  const std::vector<std::string>& slot_names() const { return slot_names_; }
  const std::string& checksum() const { return checksum_; }

  /// Fills every marker from `values`. Missing or unknown slot names and
  /// blank values raise InvalidInput.
  RenderedPrompt Render(const std::map<std::string, std::string_view>& values,
                        std::vector<std::string> input_ids = {}) const;

 private:
  struct Piece {
    std::string literal;   // text preceding the marker
    std::string slot;      // empty for the trailing literal
  };

  PromptTask task_;
  std::string text_;
  std::string checksum_;
  std::vector<Piece> pieces_;
  std::vector<std::string> slot_names_;
};

/// The four templates loaded from an asset directory. Each file's SHA-256
/// must match `checksums.json`; a mismatch throws std::runtime_error.
class TemplateSet {
 public:
  static TemplateSet Load(const std::string& template_dir);
  /// Loads from FCJUDGE_ASSET_DIR (environment) or the build-time default.
  static TemplateSet LoadDefault();

  const PromptTemplate& Get(PromptTask task) const;
  const std::string& version() const { return version_; }

 private:
  std::vector<PromptTemplate> templates_;
  std::string version_;
};

/// Directory holding templates/, lexicon/ and reference/ assets.
std::string DefaultAssetDir();

RenderedPrompt RenderEIZeroShot(const TemplateSet& templates, std::string_view document,
                                std::string_view summary);
RenderedPrompt RenderEIChainOfThought(const TemplateSet& templates, std::string_view document,
                                      std::string_view summary);
/// Slot order is the caller's; identical candidates are rejected.
RenderedPrompt RenderRanking(const TemplateSet& templates, std::string_view article,
                             std::string_view candidate_a, std::string_view candidate_b);
RenderedPrompt RenderRating(const TemplateSet& templates, std::string_view document,
                            std::string_view summary);

/// Slot that holds the consistent candidate for a ranking record. Under
/// fixed ordering it is always A; otherwise it is derived from a
/// hash of the record id so that about half the records put it in B.
SlotPosition GoldSlotFor(std::string_view record_id, bool paper_faithful_ordering);

struct RankingPrompt {
  RenderedPrompt prompt;
  SlotPosition gold_slot = SlotPosition::kA;
};

RankingPrompt RenderRankingRecord(const TemplateSet& templates, const RankingRecord& record,
                                  bool paper_faithful_ordering);

}  // namespace fcjudge
