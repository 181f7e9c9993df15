#include "fcjudge/core_model.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "fcjudge/text_util.hpp"

namespace fcjudge {

std::string_view ToString(ConsistencyLabel label) {
  return label == ConsistencyLabel::kConsistent ? "consistent" : "inconsistent";
}

std::string_view ToString(Dataset dataset) {
  switch (dataset) {
    case Dataset::kCoGenSumm: return "CoGenSumm";
    case Dataset::kXSumFaith: return "XSumFaith";
    case Dataset::kPolytope: return "Polytope";
    case Dataset::kFactCC: return "FactCC";
    case Dataset::kSummEval: return "SummEval";
    case Dataset::kFrank: return "FRANK";
  }
  return "unknown";
}

std::string_view ToString(Split split) {
  return split == Split::kValidation ? "validation" : "test";
}

std::string_view ToString(Origin origin) { return origin == Origin::kCnnDm ? "cnndm" : "xsum"; }

std::string_view ToString(RatingScheme scheme) {
  return scheme == RatingScheme::kSummEvalLikert5 ? "SummEvalLikert5" : "FrankBinaryAggregate";
}

std::string_view ToString(EIVerdictValue value) {
  switch (value) {
    case EIVerdictValue::kConsistent: return "consistent";
    case EIVerdictValue::kInconsistent: return "inconsistent";
    case EIVerdictValue::kUnparseable: return "unparseable";
  }
  return "unparseable";
}

std::string_view ToString(RankChoice choice) {
  switch (choice) {
    case RankChoice::kA: return "A";
    case RankChoice::kB: return "B";
    case RankChoice::kInvalid: return "invalid";
  }
  return "invalid";
}

std::string_view ToString(SlotPosition position) {
  return position == SlotPosition::kA ? "A" : "B";
}

ConsistencyLabel Opposite(ConsistencyLabel label) {
  return label == ConsistencyLabel::kConsistent ? ConsistencyLabel::kInconsistent
                                                : ConsistencyLabel::kConsistent;
}

std::optional<Dataset> ParseDataset(std::string_view text) {
  const std::string key = AsciiLower(Trim(text));
  if (key == "cogensumm" || key == "cogensum") return Dataset::kCoGenSumm;
  if (key == "xsumfaith") return Dataset::kXSumFaith;
  if (key == "polytope") return Dataset::kPolytope;
  if (key == "factcc") return Dataset::kFactCC;
  if (key == "summeval") return Dataset::kSummEval;
  if (key == "frank") return Dataset::kFrank;
  return std::nullopt;
}

std::optional<Split> ParseSplit(std::string_view text) {
  const std::string key = AsciiLower(Trim(text));
  if (key == "validation" || key == "val" || key == "valid" || key == "dev") {
    return Split::kValidation;
  }
  if (key == "test") return Split::kTest;
  return std::nullopt;
}

std::optional<Origin> ParseOrigin(std::string_view text) {
  const std::string key = AsciiLower(Trim(text));
  if (key == "cnndm" || key == "cnn/dm" || key == "cnn_dm" || key == "cnn") return Origin::kCnnDm;
  if (key == "xsum") return Origin::kXSum;
  return std::nullopt;
}

std::optional<RatingScheme> ParseRatingScheme(std::string_view text) {
  const std::string key = AsciiLower(Trim(text));
  if (key == "summevallikert5" || key == "summeval") return RatingScheme::kSummEvalLikert5;
  if (key == "frankbinaryaggregate" || key == "frank") return RatingScheme::kFrankBinaryAggregate;
  return std::nullopt;
}

ConfusionMatrix ConfusionMatrix::WithPositiveClass(ConsistencyLabel positive) const {
  if (positive == positive_class) return *this;
  return ConfusionMatrix{.tp = tn, .fp = fn, .tn = tp, .fn = fp, .positive_class = positive};
}

double NormalizeRating(std::span<const double> raw_annotations, RatingScheme scheme) {
  if (raw_annotations.empty()) throw InvalidInput("no annotations to normalize");
  switch (scheme) {
    case RatingScheme::kSummEvalLikert5: {
      for (double value : raw_annotations) {
        if (!(value == 1 || value == 2 || value == 3 || value == 4 || value == 5)) {
          throw InvalidInput(
              fmt::format("annotation {} is not on the 1-5 Likert scale", FormatDouble(value)));
        }
      }
      const double mean = std::accumulate(raw_annotations.begin(), raw_annotations.end(), 0.0) /
                          static_cast<double>(raw_annotations.size());
      return (mean - 1.0) / 4.0;
    }
    case RatingScheme::kFrankBinaryAggregate: {
      if (raw_annotations.size() != 1) {
        throw InvalidInput(fmt::format("aggregate scheme expects one value, got {}",
                                       raw_annotations.size()));
      }
      const double value = raw_annotations.front();
      if (!(value >= 0.0 && value <= 1.0)) {
        throw InvalidInput(
            fmt::format("aggregate score {} is outside [0, 1]", FormatDouble(value)));
      }
      return value;
    }
  }
  throw InvalidInput("unknown rating scheme");
}

bool HasContent(std::string_view text) { return !Trim(text).empty(); }

std::optional<std::string> ValidateRecord(const EIRecord& record) {
  if (!HasContent(record.document)) return "empty document";
  if (!HasContent(record.summary)) return "empty summary";
  return std::nullopt;
}

std::optional<std::string> ValidateRecord(const RankingRecord& record) {
  if (!HasContent(record.article)) return "empty article";
  if (!HasContent(record.consistent_summary) || !HasContent(record.inconsistent_summary)) {
    return "empty candidate summary";
  }
  if (record.consistent_summary == record.inconsistent_summary) return "identical candidates";
  return std::nullopt;
}

std::optional<std::string> ValidateRecord(const RatingRecord& record) {
  if (!HasContent(record.document)) return "empty document";
  if (!HasContent(record.summary)) return "empty summary";
  if (!(record.human_score >= 0.0 && record.human_score <= 1.0)) {
    return fmt::format("human score {} outside [0, 1]", FormatDouble(record.human_score));
  }
  return std::nullopt;
}

}  // namespace fcjudge
