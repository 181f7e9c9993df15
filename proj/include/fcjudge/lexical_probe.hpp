// Lexical overlap between a summary and its source, used to study whether
// judge errors track how extractive a summary is.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcjudge/core_model.hpp"

namespace fcjudge {

/// Lowercased tokens split on every non-alphanumeric ASCII byte. Bytes
/// >= 0x80 count as word characters so UTF-8 words stay whole.
std::vector<std::string> Tokenize(std::string_view text);

inline constexpr int kMaxNgramOrder = 4;

struct OverlapProfile {
  // n -> share of summary n-gram occurrences absent from the document.
  // Orders longer than the summary are omitted.
  std::map<int, double> novel_ngram_fraction;
  // LCS of the token sequences divided by the summary token count.
  double longest_common_subsequence_ratio = 0.0;
};

OverlapProfile ComputeOverlapProfile(std::string_view summary, std::string_view document);

std::size_t LongestCommonSubsequence(std::span<const std::string> a, std::span<const std::string> b);

/// Mean profile over a group of records.
struct GroupOverlap {
  std::size_t count = 0;
  std::map<int, double> mean_novel_fraction;  // averaged where the order exists
  double mean_lcs_ratio = 0.0;
};

struct BiasReport {
  // Keyed by (gold label, predicted verdict); a missing key means the group
  // is empty.
  std::map<std::pair<ConsistencyLabel, EIVerdictValue>, GroupOverlap> by_outcome;
  std::map<Dataset, GroupOverlap> by_dataset;
  std::map<Origin, GroupOverlap> by_origin;

  /// Group by outcome, or nullopt when no record fell into it.
  std::optional<GroupOverlap> Outcome(ConsistencyLabel gold, EIVerdictValue predicted) const;
};

BiasReport BuildBiasReport(std::span<const EIRecord> records, std::span<const EIVerdict> verdicts);

}  // namespace fcjudge
