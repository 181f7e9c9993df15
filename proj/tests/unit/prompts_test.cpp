#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fcjudge/prompts.hpp"
#include "fcjudge/text_util.hpp"
#include "support/test_support.hpp"

using namespace fcjudge;
using testing_support::AssetPath;
using testing_support::DataPath;
using testing_support::TempDir;

namespace {

const TemplateSet& Templates() {
  static const TemplateSet set = TemplateSet::Load(AssetPath("templates"));
  return set;
}

std::string LastLine(const std::string& body) { return body.substr(body.rfind('\n') + 1); }

bool Contains(const std::string& hay, std::string_view needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Prompts, BlankedBodiesMatchGoldenFiles) {
  const std::pair<PromptTask, RenderedPrompt> cases[] = {
      {PromptTask::kEIZeroShot, RenderEIZeroShot(Templates(), "D", "S")},
      {PromptTask::kEIChainOfThought, RenderEIChainOfThought(Templates(), "D", "S")},
      {PromptTask::kRanking, RenderRanking(Templates(), "D", "S1", "S2")},
      {PromptTask::kRating, RenderRating(Templates(), "D", "S")},
  };
  for (const auto& [task, prompt] : cases) {
    const auto golden = ReadFile(DataPath("golden/" + std::string(ToString(task)) + ".txt"));
    EXPECT_EQ(prompt.BlankedBody() + "\n", golden) << ToString(task);
    EXPECT_TRUE(prompt.placeholders_filled);
  }
}

TEST(Prompts, ZeroShotWording) {
  const auto p = RenderEIZeroShot(Templates(), "D", "S");
  EXPECT_TRUE(Contains(p.body,
                       "Note that consistency means all information in the summary is supported by the article."));
  EXPECT_EQ(LastLine(p.body), "Answer (yes or no):");
}

TEST(Prompts, ChainOfThoughtFinalLine) {
  const auto p = RenderEIChainOfThought(Templates(), "An article.", "A summary.");
  EXPECT_EQ(LastLine(p.body), "Explain your reasoning step by step then answer (yes or no) the question:");
}

TEST(Prompts, RankingOrderAndCue) {
  const auto p = RenderRanking(Templates(), "Art", "first", "second");
  const auto a = p.body.find("Summary A: first");
  const auto b = p.body.find("Summary B: second");
  ASSERT_NE(a, std::string::npos);
  ASSERT_NE(b, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_EQ(LastLine(p.body), "Answer (A or B):");
  EXPECT_THROW(RenderRanking(Templates(), "Art", "same", "same"), InvalidInput);
}

TEST(Prompts, RatingWording) {
  const auto p = RenderRating(Templates(), "D", "S");
  EXPECT_TRUE(Contains(p.body, "from 1 to 10"));
  EXPECT_TRUE(Contains(
      p.body, "10 points indicate the summary contains only statements that are entailed by the source document."));
}

TEST(Prompts, Deterministic) {
  EXPECT_EQ(RenderEIZeroShot(Templates(), "D", "S").body, RenderEIZeroShot(Templates(), "D", "S").body);
  EXPECT_EQ(RenderEIZeroShot(Templates(), "D", "S").Checksum(), RenderEIZeroShot(Templates(), "D", "S").Checksum());
}

TEST(Prompts, SinglePassSubstitution) {
  const std::string doc = "Header [Article] then {{summary}} and {{article}} literally.";
  const auto p = RenderEIZeroShot(Templates(), doc, "S");
  EXPECT_TRUE(Contains(p.body, "Article: " + doc + "\n"));
  EXPECT_TRUE(Contains(p.body, "Summary: S\n"));
  // Blanking uses recorded spans, so marker text inside the document does
  // not confuse it.
  EXPECT_EQ(p.BlankedBody() + "\n", ReadFile(DataPath("golden/ei_zs.txt")));
}

TEST(Prompts, EmptyInputsRejected) {
  EXPECT_THROW(RenderEIChainOfThought(Templates(), "D", ""), InvalidInput);
  EXPECT_THROW(RenderEIZeroShot(Templates(), "  \n", "S"), InvalidInput);
  EXPECT_THROW(RenderRating(Templates(), "D", "\t"), InvalidInput);
}

TEST(Prompts, TemplateSlotErrors) {
  PromptTemplate t(PromptTask::kEIZeroShot, "A {{article}} B {{summary}}\n");
  EXPECT_EQ(t.slot_names(), (std::vector<std::string>{"article", "summary"}));
  EXPECT_THROW(t.Render({{"article", "x"}}), InvalidInput);
  EXPECT_THROW(t.Render({{"article", "x"}, {"summary", "y"}, {"extra", "z"}}), InvalidInput);
  const auto p = t.Render({{"article", "x"}, {"summary", "y"}}, {"id-1"});
  EXPECT_EQ(p.body, "A x B y");
  EXPECT_EQ(p.input_ids, std::vector<std::string>{"id-1"});
  ASSERT_EQ(p.slots.size(), 2u);
  EXPECT_EQ(p.slots[1].offset, 6u);
}

TEST(Prompts, ChecksumMismatchRefusesToLoad) {
  TempDir dir;
  for (const auto& entry : std::filesystem::directory_iterator(AssetPath("templates"))) {
    std::filesystem::copy_file(entry.path(), dir.path() / entry.path().filename());
  }
  EXPECT_NO_THROW(TemplateSet::Load(dir.path().string()));
  std::ofstream(dir / "ei_zs.txt", std::ios::app) << "tampered";
  EXPECT_THROW(TemplateSet::Load(dir.path().string()), std::runtime_error);
}

TEST(Balancing, GoldSlotNearHalf) {
  std::size_t in_a = 0;
  for (int i = 0; i < 1000; ++i) in_a += GoldSlotFor("synthetic-" + std::to_string(i), false) == SlotPosition::kA;
  const double fraction = in_a / 1000.0;
  EXPECT_GE(fraction, 0.45);
  EXPECT_LE(fraction, 0.55);
}

TEST(Balancing, FixedOrderingAlwaysA) {
  for (int i = 0; i < 100; ++i) EXPECT_EQ(GoldSlotFor(std::to_string(i), true), SlotPosition::kA);
}

TEST(Balancing, RecordRenderPlacesGoldInItsSlot) {
  for (int i = 0; i < 20; ++i) {
    RankingRecord r{"rec-" + std::to_string(i), "Article text.", "good one", "bad one"};
    const auto rendered = RenderRankingRecord(Templates(), r, false);
    const std::string gold_marker =
        rendered.gold_slot == SlotPosition::kA ? "Summary A: good one" : "Summary B: good one";
    EXPECT_TRUE(Contains(rendered.prompt.body, gold_marker));
    EXPECT_EQ(rendered.prompt.input_ids, std::vector<std::string>{r.id});
    EXPECT_EQ(rendered.gold_slot, GoldSlotFor(r.id, false));
  }
}
