#include "fcjudge/lexical_probe.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>

namespace fcjudge {
namespace {

bool IsTokenByte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || u >= 0x80;
}

std::string JoinNgram(std::span<const std::string> tokens, std::size_t start, int n) {
  std::string key;
  for (int k = 0; k < n; ++k) {
    if (k > 0) key.push_back(' ');
    key += tokens[start + static_cast<std::size_t>(k)];
  }
  return key;
}

struct Accumulator {
  std::size_t count = 0;
  std::map<int, double> novel_sum;
  std::map<int, std::size_t> novel_count;
  double lcs_sum = 0.0;

  void Add(const OverlapProfile& profile) {
    ++count;
    for (const auto& [n, fraction] : profile.novel_ngram_fraction) {
      novel_sum[n] += fraction;
      ++novel_count[n];
    }
    lcs_sum += profile.longest_common_subsequence_ratio;
  }

  GroupOverlap Mean() const {
    GroupOverlap out;
    out.count = count;
    for (const auto& [n, sum] : novel_sum) {
      out.mean_novel_fraction[n] = sum / static_cast<double>(novel_count.at(n));
    }
    out.mean_lcs_ratio = count == 0 ? 0.0 : lcs_sum / static_cast<double>(count);
    return out;
  }
};

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (IsTokenByte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t LongestCommonSubsequence(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      row[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], row[j - 1]);
    }
    std::swap(prev, row);
  }
  return prev[b.size()];
}

OverlapProfile ComputeOverlapProfile(std::string_view summary, std::string_view document) {
  const auto summary_tokens = Tokenize(summary);
  const auto document_tokens = Tokenize(document);
  if (summary_tokens.empty()) throw InvalidInput("summary has no tokens");
  if (document_tokens.empty()) throw InvalidInput("document has no tokens");

  OverlapProfile profile;
  for (int n = 1; n <= kMaxNgramOrder; ++n) {
    const auto order = static_cast<std::size_t>(n);
    if (summary_tokens.size() < order) break;
    std::set<std::string> document_ngrams;
    for (std::size_t i = 0; i + order <= document_tokens.size(); ++i) {
      document_ngrams.insert(JoinNgram(document_tokens, i, n));
    }
    const std::size_t total = summary_tokens.size() - order + 1;
    std::size_t novel = 0;
    for (std::size_t i = 0; i < total; ++i) {
      novel += !document_ngrams.contains(JoinNgram(summary_tokens, i, n));
    }
    profile.novel_ngram_fraction[n] = static_cast<double>(novel) / static_cast<double>(total);
  }
  profile.longest_common_subsequence_ratio =
      static_cast<double>(LongestCommonSubsequence(summary_tokens, document_tokens)) /
      static_cast<double>(summary_tokens.size());
  return profile;
}

std::optional<GroupOverlap> BiasReport::Outcome(ConsistencyLabel gold, EIVerdictValue predicted) const {
  if (auto it = by_outcome.find({gold, predicted}); it != by_outcome.end()) return it->second;
  return std::nullopt;
}

BiasReport BuildBiasReport(std::span<const EIRecord> records, std::span<const EIVerdict> verdicts) {
  if (records.size() != verdicts.size()) {
    throw InvalidInput(fmt::format("bias report: {} records but {} verdicts", records.size(), verdicts.size()));
  }
  std::map<std::pair<ConsistencyLabel, EIVerdictValue>, Accumulator> outcome;
  std::map<Dataset, Accumulator> dataset;
  std::map<Origin, Accumulator> origin;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto profile = ComputeOverlapProfile(records[i].summary, records[i].document);
    outcome[{records[i].gold, verdicts[i].value}].Add(profile);
    dataset[records[i].dataset].Add(profile);
    if (records[i].origin) origin[*records[i].origin].Add(profile);
  }
  BiasReport report;
  for (const auto& [key, acc] : outcome) report.by_outcome[key] = acc.Mean();
  for (const auto& [key, acc] : dataset) report.by_dataset[key] = acc.Mean();
  for (const auto& [key, acc] : origin) report.by_origin[key] = acc.Mean();
  return report;
}

}  // namespace fcjudge
