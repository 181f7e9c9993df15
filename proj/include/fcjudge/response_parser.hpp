// Turns raw judge text into verdicts. Parsing is total: every input yields
// exactly one verdict plus a trace, and nothing here throws on odd text.
//
// Entailment rules, in order:
//   1. any hedged ("partially consistent") or undetermined ("cannot
//      determine") phrase -> inconsistent;
//   2. otherwise the last decisive statement wins: lexicon affirm/negate
//      phrases and explicit "Answer: yes/no" markers, scanned in text order;
//   3. otherwise a bare yes/no opening a line;
//   4. otherwise unparseable.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fcjudge/core_model.hpp"

namespace fcjudge {

enum class TraceConfidence { kExact, kHeuristic, kFallback };

std::string_view ToString(TraceConfidence confidence);

struct ParseTrace {
  std::string matched_rule;  // "none" when nothing matched
  std::size_t begin = 0;     // byte range into the raw text
  std::size_t end = 0;
  TraceConfidence confidence = TraceConfidence::kFallback;
};

enum class ParseMode { kZeroShot, kChainOfThought };

/// Phrase lists driving the parser, loaded from a versioned asset.
struct Lexicon {
  std::string version;
  std::vector<std::string> hedge;
  std::vector<std::string> undetermined;
  std::vector<std::string> negate;
  std::vector<std::string> affirm;
  std::vector<std::string> negators;
  std::vector<std::string> neutral;
  std::vector<std::string> rank_invalid;

  /// Reads lexicon.json from `dir` and checks it against checksums.json.
  static Lexicon Load(const std::string& dir);
  static Lexicon LoadDefault();
};

struct EIParse {
  EIVerdict verdict;
  ParseTrace trace;
};

struct RankParse {
  RankChoice choice = RankChoice::kInvalid;
  ParseTrace trace;
};

struct RatingParse {
  RatingVerdict verdict;
  ParseTrace trace;
};

/// Lowest and highest score the rating prompt asks for.
inline constexpr double kRatingMin = 1.0;
inline constexpr double kRatingMax = 10.0;

class ResponseParser {
 public:
  explicit ResponseParser(Lexicon lexicon);

  const Lexicon& lexicon() const { return lexicon_; }

  EIParse ParseEI(std::string_view raw_text, ParseMode mode) const;

  /// A or B when exactly one candidate is endorsed; both, neither, or no
  /// endorsement is Invalid.
  RankParse ParseRank(std::string_view raw_text) const;

  /// First standalone number, ignoring scale mentions ("1 to 10") and
  /// denominators ("/10", "out of 10").
  RatingParse ParseRating(std::string_view raw_text) const;

 private:
  Lexicon lexicon_;
};

}  // namespace fcjudge
