#include <gtest/gtest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "fcjudge/datasets.hpp"
#include "support/test_support.hpp"

using namespace fcjudge;
using testing_support::DataPath;
using testing_support::TempDir;

namespace {

DatasetManifest Manifest(const std::string& path, std::optional<std::size_t> count = {},
                         std::optional<double> rate = {}) {
  DatasetManifest m;
  m.name = "fixture";
  m.dataset = Dataset::kCoGenSumm;
  m.path = path;
  m.expected_count = count;
  m.expected_positive_rate = rate;
  return m;
}

void WriteFile(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(EILoader, TenRecordFixture) {
  const auto loaded = LoadEIDataset(Manifest(DataPath("ei/ten.jsonl"), 10, 0.7));
  ASSERT_EQ(loaded.records.size(), 10u);
  EXPECT_TRUE(loaded.rejections.empty());
  EXPECT_DOUBLE_EQ(ConsistentRate(loaded.records), 0.7);
  EXPECT_EQ(loaded.records[9].document.substr(0, 5), "Caf\xC3\xA9");
}

TEST(EILoader, ManifestResolvesRelativePaths) {
  const auto manifests = LoadManifestFile(DataPath("ei/ten_manifest.json"));
  ASSERT_EQ(manifests.size(), 1u);
  EXPECT_EQ(manifests[0].split, Split::kValidation);
  const auto loaded = LoadEIDataset(manifests[0]);
  EXPECT_EQ(loaded.records.size(), 10u);
}

TEST(EILoader, EmptyFileWithZeroExpected) {
  TempDir dir;
  WriteFile(dir / "empty.jsonl", "");
  EXPECT_TRUE(LoadEIDataset(Manifest(dir / "empty.jsonl", 0)).records.empty());
}

TEST(EILoader, BadLinesAreRejectedWithLineNumbers) {
  const auto loaded = LoadEIDataset(Manifest(DataPath("ei/with_bad_lines.jsonl")));
  ASSERT_EQ(loaded.records.size(), 2u);
  std::vector<std::size_t> lines;
  for (const auto& r : loaded.rejections) lines.push_back(r.line);
  EXPECT_EQ(lines, (std::vector<std::size_t>{2, 3, 5, 6}));
}

TEST(EILoader, CountMismatchCitesBothNumbers) {
  try {
    LoadEIDataset(Manifest(DataPath("ei/ten.jsonl"), 11));
    FAIL();
  } catch (const DatasetError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("11"), std::string::npos) << what;
    EXPECT_NE(what.find("10"), std::string::npos) << what;
  }
}

TEST(EILoader, RateMismatchThrows) {
  EXPECT_THROW(LoadEIDataset(Manifest(DataPath("ei/ten.jsonl"), 10, 0.6)), DatasetError);
  EXPECT_NO_THROW(LoadEIDataset(Manifest(DataPath("ei/ten.jsonl"), 10, 0.7005)));
}

TEST(EILoader, MissingFileThrows) {
  EXPECT_THROW(LoadEIDataset(Manifest("/nonexistent/file.jsonl")), DatasetError);
}

TEST(BenchmarkStats, PublishedTable) {
  EXPECT_EQ(StatsFor(Dataset::kFactCC).test_size, 503u);
  EXPECT_EQ(StatsFor(Dataset::kFactCC).validation_size, 931u);
  EXPECT_DOUBLE_EQ(StatsFor(Dataset::kFactCC).percent_consistent, 85.0);
  EXPECT_EQ(StatsFor(Dataset::kFrank).test_size, 1575u);
  EXPECT_EQ(StatsFor(Dataset::kCoGenSumm).validation_size, 1281u);
  EXPECT_DOUBLE_EQ(StatsFor(Dataset::kSummEval).percent_consistent, 90.6);
  EXPECT_EQ(kRankingDatasetSize, 373u);
  EXPECT_EQ(kSummEvalRatingSize, 1600u);
  EXPECT_EQ(kFrankRatingSize, 2250u);
}

TEST(RankingLoader, SingleRow) {
  TempDir dir;
  WriteFile(dir / "one.jsonl",
            R"({"id":"p","article_sent":"The vote passed.","correct_sent":"The vote passed.","incorrect_sent":"The vote failed."})"
            "\n");
  const auto loaded = LoadRankingDataset(dir / "one.jsonl");
  ASSERT_EQ(loaded.records.size(), 1u);
  EXPECT_EQ(loaded.records[0].consistent_summary, "The vote passed.");
  EXPECT_EQ(loaded.records[0].inconsistent_summary, "The vote failed.");
}

TEST(RankingLoader, IdenticalCandidatesRejected) {
  TempDir dir;
  WriteFile(dir / "same.jsonl",
            R"({"id":"dup","article":"x","correct_sent":"same","incorrect_sent":"same"})"
            "\n");
  const auto loaded = LoadRankingDataset(dir / "same.jsonl");
  EXPECT_TRUE(loaded.records.empty());
  ASSERT_EQ(loaded.rejections.size(), 1u);
  EXPECT_EQ(loaded.rejections[0].id, "dup");
}

TEST(RankingLoader, SwappedColumnsRoundTrip) {
  const auto original = LoadRankingDataset(DataPath("ranking/pairs.jsonl")).records;
  TempDir dir;
  {
    std::ofstream out(dir / "swapped.jsonl");
    for (const auto& r : original) {
      // Swap then swap back while writing, through the alternate field name.
      std::string a = r.inconsistent_summary, b = r.consistent_summary;
      std::swap(a, b);
      out << nlohmann::json{{"id", r.id}, {"article", r.article}, {"correct_sent", a}, {"incorrect_sent", b}}.dump()
          << "\n";
    }
  }
  const auto again = LoadRankingDataset(dir / "swapped.jsonl").records;
  ASSERT_EQ(again.size(), original.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    EXPECT_EQ(again[i].id, original[i].id);
    EXPECT_EQ(again[i].consistent_summary, original[i].consistent_summary);
    EXPECT_EQ(again[i].inconsistent_summary, original[i].inconsistent_summary);
  }
}

TEST(RatingLoader, ThreeThreeThreeIsHalf) {
  const auto loaded = LoadRatingDataset(DataPath("rating/summeval_mini.jsonl"), RatingScheme::kSummEvalLikert5);
  ASSERT_EQ(loaded.records.size(), 24u);
  EXPECT_EQ(loaded.records[0].raw_annotations, (std::vector<double>{3, 3, 3}));
  EXPECT_DOUBLE_EQ(loaded.records[0].human_score, 0.5);
  EXPECT_EQ(loaded.records[0].system, "M0");
}

TEST(RatingLoader, ShortAnnotationListAveragesAvailable) {
  TempDir dir;
  WriteFile(dir / "two.jsonl", R"({"id":"a","document":"d","summary":"s","annotations":[5,3]})"
                               "\n");
  const auto loaded = LoadRatingDataset(dir / "two.jsonl", RatingScheme::kSummEvalLikert5);
  ASSERT_EQ(loaded.records.size(), 1u);
  EXPECT_DOUBLE_EQ(loaded.records[0].human_score, 0.75);
}

TEST(RatingLoader, OutOfScaleAnnotationRejected) {
  TempDir dir;
  WriteFile(dir / "bad.jsonl", R"({"id":"a","document":"d","summary":"s","annotations":[5,9,5]})"
                               "\n");
  const auto loaded = LoadRatingDataset(dir / "bad.jsonl", RatingScheme::kSummEvalLikert5);
  EXPECT_TRUE(loaded.records.empty());
  ASSERT_EQ(loaded.rejections.size(), 1u);
  EXPECT_NE(loaded.rejections[0].reason.find('9'), std::string::npos);
}

TEST(Origins, Partition) {
  const auto frank = LoadRatingDataset(DataPath("rating/frank_mini.jsonl"), RatingScheme::kFrankBinaryAggregate);
  const auto parts = SplitByOrigin<RatingRecord>(frank.records);
  EXPECT_EQ(parts.cnndm.size() + parts.xsum.size(), frank.records.size());
  EXPECT_TRUE(parts.unknown.empty());

  std::vector<EIRecord> mixed(5);
  for (std::size_t i = 0; i < 5; ++i) mixed[i].origin = i < 3 ? Origin::kCnnDm : Origin::kXSum;
  auto sizes = SplitByOrigin<EIRecord>(mixed);
  EXPECT_EQ(sizes.cnndm.size(), 3u);
  EXPECT_EQ(sizes.xsum.size(), 2u);

  std::vector<EIRecord> all_cnn(4);
  for (auto& r : all_cnn) r.origin = Origin::kCnnDm;
  auto degenerate = SplitByOrigin<EIRecord>(all_cnn);
  EXPECT_EQ(degenerate.cnndm.size(), 4u);
  EXPECT_TRUE(degenerate.xsum.empty());

  mixed.push_back(EIRecord{});
  EXPECT_EQ(SplitByOrigin<EIRecord>(mixed).unknown.size(), 1u);
}
