// Shared domain types: task records, parsed verdicts, and measurement
// primitives. Everything here is an immutable value once constructed.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fcjudge {

/// Raised when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ConsistencyLabel { kConsistent, kInconsistent };

enum class Dataset { kCoGenSumm, kXSumFaith, kPolytope, kFactCC, kSummEval, kFrank };
enum class Split { kValidation, kTest };
enum class Origin { kCnnDm, kXSum };

std::string_view ToString(ConsistencyLabel label);
std::string_view ToString(Dataset dataset);
std::string_view ToString(Split split);
std::string_view ToString(Origin origin);

ConsistencyLabel Opposite(ConsistencyLabel label);

// Parsers accept the canonical names above case-insensitively plus common
// aliases ("cogensum", "frank", "cnn/dm", "valid", ...).
std::optional<Dataset> ParseDataset(std::string_view text);
std::optional<Split> ParseSplit(std::string_view text);
std::optional<Origin> ParseOrigin(std::string_view text);

/// Datasets in the column order used by the balanced-accuracy report.
inline constexpr Dataset kAllDatasets[] = {Dataset::kCoGenSumm, Dataset::kXSumFaith,
                                           Dataset::kPolytope,  Dataset::kFactCC,
                                           Dataset::kSummEval,  Dataset::kFrank};

struct EIRecord {
  std::string id;
  std::string document;
  std::string summary;
  ConsistencyLabel gold = ConsistencyLabel::kConsistent;
  Dataset dataset = Dataset::kCoGenSumm;
  Split split = Split::kTest;
  std::optional<Origin> origin;
};

struct RankingRecord {
  std::string id;
  std::string article;
  std::string consistent_summary;
  std::string inconsistent_summary;
};

enum class RatingScheme { kSummEvalLikert5, kFrankBinaryAggregate };

std::string_view ToString(RatingScheme scheme);
std::optional<RatingScheme> ParseRatingScheme(std::string_view text);

struct RatingRecord {
  std::string id;
  std::string document;
  std::string summary;
  double human_score = 0.0;  // in [0, 1]
  std::vector<double> raw_annotations;
  RatingScheme scheme = RatingScheme::kSummEvalLikert5;
  std::optional<Origin> origin;
  std::optional<std::string> system;  // producing summarizer, when known
};

enum class EIVerdictValue { kConsistent, kInconsistent, kUnparseable };

std::string_view ToString(EIVerdictValue value);

struct EIVerdict {
  EIVerdictValue value = EIVerdictValue::kUnparseable;
  // Raw response text kept verbatim. Always set for chain-of-thought
  // responses and for unparseable ones.
  std::optional<std::string> rationale;

  /// Label used for scoring: unparseable responses count as inconsistent.
  ConsistencyLabel ScoredLabel() const {
    return value == EIVerdictValue::kConsistent ? ConsistencyLabel::kConsistent
                                                : ConsistencyLabel::kInconsistent;
  }
};

enum class RankChoice { kA, kB, kInvalid };
enum class SlotPosition { kA, kB };

std::string_view ToString(RankChoice choice);
std::string_view ToString(SlotPosition position);

struct RatingVerdict {
  std::optional<double> score;  // absent when no number was found
  bool in_range = false;        // score present and within [1, 10]
};

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  ConsistencyLabel positive_class = ConsistencyLabel::kInconsistent;

  std::uint64_t Total() const { return tp + fp + tn + fn; }

  /// Same counts viewed with the other label as positive.
  ConfusionMatrix WithPositiveClass(ConsistencyLabel positive) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct CorrelationReport {
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
  std::size_t n = 0;
};

/// Normalizes raw human annotations to a score in [0, 1].
///
/// SummEvalLikert5 maps the mean of 1..5 Likert points linearly onto [0, 1];
/// every value must be one of {1,2,3,4,5}. FrankBinaryAggregate expects a
/// single, already aggregated value in [0, 1] and passes it through.
/// Throws InvalidInput naming the offending value.
double NormalizeRating(std::span<const double> raw_annotations, RatingScheme scheme);

/// Checks the record invariants shared by every loader; returns a reason
/// string when the record must be rejected.
std::optional<std::string> ValidateRecord(const EIRecord& record);
std::optional<std::string> ValidateRecord(const RankingRecord& record);
std::optional<std::string> ValidateRecord(const RatingRecord& record);

/// True when the text has at least one non-whitespace character.
bool HasContent(std::string_view text);

}  // namespace fcjudge
