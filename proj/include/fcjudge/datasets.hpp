// Loading and validation of benchmark files in the canonical line-delimited
// JSON format. Bad lines are rejected one by one and reported; the load only
// fails as a whole when a manifest expectation (size, label rate) is broken.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcjudge/core_model.hpp"

namespace fcjudge {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetManifest {
  std::string name;  // free-form label used in reports, e.g. "FactCC/test"
  std::optional<Dataset> dataset;
  Split split = Split::kTest;
  std::string path;
  std::optional<std::size_t> expected_count;
  std::optional<double> expected_positive_rate;  // fraction labelled consistent
  std::optional<RatingScheme> scheme;            // rating files only
};

struct Rejection {
  std::size_t line = 0;  // 1-based
  std::string id;
  std::string reason;
};

template <typename Record>
struct LoadResult {
  std::vector<Record> records;
  std::vector<Rejection> rejections;
};

/// Allowed deviation of the loaded consistent-rate from the manifest value:
/// 0.1 percentage points.
inline constexpr double kPositiveRateTolerance = 0.001;

/// Published size and label balance of one benchmark dataset.
struct BenchmarkStats {
  Dataset dataset;
  std::size_t validation_size;
  std::size_t test_size;
  double percent_consistent;  // measured on the test split
};

/// The six-dataset entailment benchmark, in report column order.
inline constexpr BenchmarkStats kBenchmarkStats[] = {
    {Dataset::kCoGenSumm, 1281, 400, 49.8}, {Dataset::kXSumFaith, 1250, 1250, 10.2},
    {Dataset::kPolytope, 634, 634, 6.6},    {Dataset::kFactCC, 931, 503, 85.0},
    {Dataset::kSummEval, 850, 850, 90.6},   {Dataset::kFrank, 671, 1575, 33.2},
};

const BenchmarkStats& StatsFor(Dataset dataset);

inline constexpr std::size_t kRankingDatasetSize = 373;
inline constexpr std::size_t kSummEvalRatingSize = 1600;
inline constexpr std::size_t kFrankRatingSize = 2250;
inline constexpr std::size_t kSummEvalExpertCount = 3;

/// Reads a JSON manifest: {"datasets": [{"dataset", "split", "path",
/// "expected_count", "expected_positive_rate", "scheme", "name"}]}.
/// Relative paths resolve against the manifest's directory.
std::vector<DatasetManifest> LoadManifestFile(const std::string& path);

/// Entailment records: fields id, document, claim (or summary), label, and
/// optional origin. Labels accept consistent/inconsistent, correct/incorrect
/// and 1/0 (1 = consistent). Throws DatasetError when the file is missing or
/// the accepted records contradict the manifest's count or label rate.
LoadResult<EIRecord> LoadEIDataset(const DatasetManifest& manifest);

/// Ranking records: fields id, article, correct_sent, incorrect_sent.
LoadResult<RankingRecord> LoadRankingDataset(const std::string& path);

/// Rating records: fields id, document, summary, origin, system, and either
/// annotations (list, Likert scheme) or score (aggregate scheme).
LoadResult<RatingRecord> LoadRatingDataset(const std::string& path, RatingScheme scheme);

double ConsistentRate(std::span<const EIRecord> records);

template <typename Record>
struct OriginPartition {
  std::vector<Record> cnndm;
  std::vector<Record> xsum;
  std::vector<Record> unknown;  // records without origin metadata
};

template <typename Record>
OriginPartition<Record> SplitByOrigin(std::span<const Record> records) {
  OriginPartition<Record> out;
  for (const auto& record : records) {
    if (!record.origin) {
      out.unknown.push_back(record);
    } else if (*record.origin == Origin::kCnnDm) {
      out.cnndm.push_back(record);
    } else {
      out.xsum.push_back(record);
    }
  }
  return out;
}

}  // namespace fcjudge
