#include "fcjudge/response_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <optional>
#include <regex>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fcjudge/prompts.hpp"
#include "fcjudge/text_util.hpp"

namespace fcjudge {
namespace {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool Overlaps(const Span& other) const { return begin < other.end && other.begin < end; }
};

bool IsWordByte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || u >= 0x80;
}

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::vector<std::string_view> SplitWords(std::string_view phrase) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < phrase.size()) {
    while (i < phrase.size() && IsSpace(phrase[i])) ++i;
    std::size_t j = i;
    while (j < phrase.size() && !IsSpace(phrase[j])) ++j;
    if (j > i) words.push_back(phrase.substr(i, j - i));
    i = j;
  }
  return words;
}

// All occurrences of a lowercase phrase in lowercase text. Words may be
// separated by any whitespace run; phrase edges that are word characters
// must sit on word boundaries.
std::vector<Span> FindPhrase(std::string_view text, std::string_view phrase) {
  std::vector<Span> found;
  const auto words = SplitWords(phrase);
  if (words.empty()) return found;
  const std::string_view first = words.front();
  std::size_t pos = 0;
  while ((pos = text.find(first, pos)) != std::string_view::npos) {
    const std::size_t start = pos;
    ++pos;
    if (IsWordByte(first.front()) && start > 0 && IsWordByte(text[start - 1])) continue;
    std::size_t cursor = start + first.size();
    bool ok = true;
    for (std::size_t w = 1; w < words.size() && ok; ++w) {
      std::size_t gap = cursor;
      while (gap < text.size() && IsSpace(text[gap])) ++gap;
      if (gap == cursor || text.compare(gap, words[w].size(), words[w]) != 0) {
        ok = false;
        break;
      }
      cursor = gap + words[w].size();
    }
    if (!ok) continue;
    const std::string_view last = words.back();
    if (IsWordByte(last.back()) && cursor < text.size() && IsWordByte(text[cursor])) continue;
    found.push_back({start, cursor});
  }
  return found;
}

std::vector<Span> FindAny(std::string_view text, const std::vector<std::string>& phrases) {
  std::vector<Span> all;
  for (const auto& phrase : phrases) {
    auto spans = FindPhrase(text, phrase);
    all.insert(all.end(), spans.begin(), spans.end());
  }
  std::sort(all.begin(), all.end(),
            [](const Span& a, const Span& b) { return a.begin < b.begin || (a.begin == b.begin && a.end > b.end); });
  return all;
}

bool OverlapsAny(const Span& span, const std::vector<Span>& others) {
  return std::any_of(others.begin(), others.end(), [&](const Span& o) { return span.Overlaps(o); });
}

bool IsClauseBreak(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '\n';
}

bool EndsWith(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() && text.substr(text.size() - suffix.size()) == suffix;
}

// Start of a negator among the (up to) three words before `begin` in the
// same clause, if any.
std::optional<std::size_t> NegatorBefore(std::string_view text, std::size_t begin,
                                         const std::vector<std::string>& negators) {
  std::size_t cursor = begin;
  for (int word = 0; word < 3; ++word) {
    while (cursor > 0 && (text[cursor - 1] == ' ' || text[cursor - 1] == '\t')) --cursor;
    if (cursor == 0 || IsClauseBreak(text[cursor - 1])) return std::nullopt;
    std::size_t start = cursor;
    while (start > 0 && !IsSpace(text[start - 1])) --start;
    std::string_view token = text.substr(start, cursor - start);
    // A clause break inside the token (e.g. "yes,") ends the window.
    if (std::any_of(token.begin(), token.end(), IsClauseBreak)) return std::nullopt;
    while (!token.empty() && (token.front() == '(' || token.front() == '"')) token.remove_prefix(1);
    while (!token.empty() && (token.back() == ')' || token.back() == '"')) token.remove_suffix(1);
    if (EndsWith(token, "n't") || EndsWith(token, "n\xE2\x80\x99t")) return start;
    if (std::find(negators.begin(), negators.end(), token) != negators.end()) return start;
    cursor = start;
  }
  return std::nullopt;
}

struct Decisive {
  Span span;
  bool consistent = false;
  std::string rule;
  TraceConfidence confidence = TraceConfidence::kHeuristic;
};

ParseTrace MakeTrace(std::string rule, Span span, TraceConfidence confidence) {
  return ParseTrace{std::move(rule), span.begin, span.end, confidence};
}

ParseTrace NoMatch() { return ParseTrace{"none", 0, 0, TraceConfidence::kFallback}; }

std::vector<std::string> LowerAll(std::vector<std::string> phrases) {
  for (auto& p : phrases) p = AsciiLower(p);
  return phrases;
}

// Iterates regex matches; callback receives the match.
template <typename Fn>
void ForEachRegex(const std::string& text, const std::regex& re, Fn fn) {
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    fn(*it);
  }
}

const std::regex& EIAnswerMarker() {
  static const std::regex re(R"(\banswer(?:\s*\(yes or no\))?\s*(?:is\s*)?[:\-]?\s*(yes|no)\b)");
  return re;
}

// Letter must be followed by end of text, punctuation, or a short verb, so
// that "the answer is a bit unclear" is not read as choice A.
constexpr const char* kLetterTail = R"((?=\s*$|\s*[.,;:!)\n]|\s+is\b|\s+because\b|\s*-))";

const std::regex& RankAnswerMarker() {
  static const std::regex re(std::string(R"(\banswer(?:\s*\(a or b\))?\s*(?:is\s*)?[:\-]?\s*\(?(?:summary\s+|sentence\s+|option\s+)?([ab])\)?)") + kLetterTail);
  return re;
}

const std::regex& RankChooseMarker() {
  static const std::regex re(std::string(R"(\b(?:choose|select|pick|prefer|go with)\s+(?:summary\s+|sentence\s+|option\s+)?([ab])\b)") + kLetterTail);
  return re;
}

const std::regex& RankLineLetter() {
  static const std::regex re(R"(^\(?(?:summary\s+|sentence\s+|option\s+)?([ab])\)?(?:[.:!)]|$))");
  return re;
}

const std::regex& RankComparative() {
  static const std::regex re(
      R"(\b(?:summary|sentence|option)\s+([ab])\b[^.\n]{0,40}?\bmore\s+(?:consistent|faithful|accurate|supported)\b)");
  return re;
}

const std::regex& RankComparativeTrailing() {
  static const std::regex re(
      R"(\bmore\s+consistent\s+(?:one\s+|summary\s+|sentence\s+|option\s+)?(?:is|would be)\s+(?:summary|sentence|option)\s+([ab])\b)");
  return re;
}

const std::regex& RankPlainEndorse() {
  static const std::regex re(
      R"(\b(?:summary|sentence)\s+([ab])\s+is\s+(?:also\s+)?(?:fully\s+|entirely\s+|completely\s+|perfectly\s+)?consistent\b)");
  return re;
}

struct LetterHit {
  Span span;
  RankChoice letter;
};

RankChoice LetterOf(const std::string& s) { return s == "a" ? RankChoice::kA : RankChoice::kB; }

// Decides a tier of letter hits: one distinct letter -> that letter (trace on
// its last hit); both letters -> Invalid.
std::optional<RankParse> ResolveTier(const std::vector<LetterHit>& hits, const std::string& rule,
                                     TraceConfidence confidence) {
  if (hits.empty()) return std::nullopt;
  const bool has_a = std::any_of(hits.begin(), hits.end(), [](const LetterHit& h) { return h.letter == RankChoice::kA; });
  const bool has_b = std::any_of(hits.begin(), hits.end(), [](const LetterHit& h) { return h.letter == RankChoice::kB; });
  const auto last = std::max_element(hits.begin(), hits.end(),
                                     [](const LetterHit& x, const LetterHit& y) { return x.span.begin < y.span.begin; });
  if (has_a && has_b) {
    return RankParse{RankChoice::kInvalid, MakeTrace(rule + ":both-endorsed", last->span, confidence)};
  }
  return RankParse{last->letter, MakeTrace(rule, last->span, confidence)};
}

}  // namespace

std::string_view ToString(TraceConfidence confidence) {
  switch (confidence) {
    case TraceConfidence::kExact: return "exact";
    case TraceConfidence::kHeuristic: return "heuristic";
    case TraceConfidence::kFallback: return "fallback";
  }
  return "fallback";
}

Lexicon Lexicon::Load(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string text = ReadFile((fs::path(dir) / "lexicon.json").string());
  const auto sums = nlohmann::json::parse(ReadFile((fs::path(dir) / "checksums.json").string()));
  const std::string expected = sums.at("sha256").at("lexicon").get<std::string>();
  if (Sha256Hex(text) != expected) {
    throw std::runtime_error(fmt::format("lexicon checksum mismatch in {}", dir));
  }
  const auto doc = nlohmann::json::parse(text);
  Lexicon lex;
  lex.version = doc.at("version").get<std::string>();
  const auto& ei = doc.at("ei");
  lex.hedge = LowerAll(ei.at("hedge").get<std::vector<std::string>>());
  lex.undetermined = LowerAll(ei.at("undetermined").get<std::vector<std::string>>());
  lex.negate = LowerAll(ei.at("negate").get<std::vector<std::string>>());
  lex.affirm = LowerAll(ei.at("affirm").get<std::vector<std::string>>());
  lex.negators = LowerAll(ei.at("negators").get<std::vector<std::string>>());
  lex.neutral = LowerAll(ei.at("neutral").get<std::vector<std::string>>());
  lex.rank_invalid = LowerAll(doc.at("rank").at("invalid").get<std::vector<std::string>>());
  return lex;
}

Lexicon Lexicon::LoadDefault() {
  return Load((std::filesystem::path(DefaultAssetDir()) / "lexicon").string());
}

ResponseParser::ResponseParser(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

EIParse ResponseParser::ParseEI(std::string_view raw_text, ParseMode mode) const {
  EIParse out;
  if (mode == ParseMode::kChainOfThought) out.verdict.rationale = std::string(raw_text);
  const std::string text = AsciiLower(raw_text);

  auto finish = [&](EIVerdictValue value, ParseTrace trace) {
    out.verdict.value = value;
    out.trace = std::move(trace);
    if (value == EIVerdictValue::kUnparseable) out.verdict.rationale = std::string(raw_text);
    return out;
  };

  // Rule 1: hedged or undetermined judgments never count as consistent.
  const auto hedges = FindAny(text, lexicon_.hedge);
  const auto undetermined = FindAny(text, lexicon_.undetermined);
  if (!hedges.empty() || !undetermined.empty()) {
    const bool hedge_first =
        !hedges.empty() && (undetermined.empty() || hedges.front().begin <= undetermined.front().begin);
    const Span span = hedge_first ? hedges.front() : undetermined.front();
    return finish(EIVerdictValue::kInconsistent,
                  MakeTrace(hedge_first ? "hedge" : "undetermined", span, TraceConfidence::kHeuristic));
  }

  // Rule 2: last decisive statement.
  // A restated question or definition covers the rest of its sentence.
  auto neutral = FindAny(text, lexicon_.neutral);
  for (Span& span : neutral) {
    const auto stop = text.find_first_of(".?!\n", span.end);
    span.end = stop == std::string::npos ? text.size() : stop;
  }
  std::vector<Decisive> decisive;
  std::vector<Span> negative_spans;
  for (const Span& span : FindAny(text, lexicon_.negate)) {
    if (OverlapsAny(span, neutral)) continue;
    negative_spans.push_back(span);
    if (auto negator = NegatorBefore(text, span.begin, lexicon_.negators)) {
      decisive.push_back({{*negator, span.end}, true, "negated-negative", TraceConfidence::kHeuristic});
    } else {
      decisive.push_back({span, false, "negative", TraceConfidence::kHeuristic});
    }
  }
  for (const Span& span : FindAny(text, lexicon_.affirm)) {
    if (OverlapsAny(span, neutral) || OverlapsAny(span, negative_spans)) continue;
    if (auto negator = NegatorBefore(text, span.begin, lexicon_.negators)) {
      decisive.push_back({{*negator, span.end}, false, "negated-affirmative", TraceConfidence::kHeuristic});
    } else {
      decisive.push_back({span, true, "affirmative", TraceConfidence::kHeuristic});
    }
  }
  ForEachRegex(text, EIAnswerMarker(), [&](const std::smatch& m) {
    const auto begin = static_cast<std::size_t>(m.position(0));
    decisive.push_back({{begin, begin + static_cast<std::size_t>(m.length(0))}, m.str(1) == "yes",
                        "answer-marker", TraceConfidence::kExact});
  });
  if (!decisive.empty()) {
    const auto last = std::max_element(decisive.begin(), decisive.end(), [](const Decisive& a, const Decisive& b) {
      return a.span.begin < b.span.begin || (a.span.begin == b.span.begin && a.span.end < b.span.end);
    });
    return finish(last->consistent ? EIVerdictValue::kConsistent : EIVerdictValue::kInconsistent,
                  MakeTrace(last->rule, last->span, last->confidence));
  }

  // Rule 3: a bare yes/no opening a line; the last such line wins.
  std::optional<Decisive> line_answer;
  std::size_t offset = 0;
  for (std::string_view line : SplitLines(text)) {
    std::size_t lead = 0;
    while (lead < line.size() && (IsSpace(line[lead]) || line[lead] == '*' || line[lead] == '-')) ++lead;
    const std::string_view rest = line.substr(lead);
    for (std::string_view word : {std::string_view("yes"), std::string_view("no")}) {
      if (rest.starts_with(word) && (rest.size() == word.size() || !IsWordByte(rest[word.size()]))) {
        const std::size_t begin = offset + lead;
        line_answer = Decisive{{begin, begin + word.size()}, word == "yes", "line-start-yes-no",
                               TraceConfidence::kFallback};
      }
    }
    offset += line.size() + 1;
  }
  if (line_answer) {
    return finish(line_answer->consistent ? EIVerdictValue::kConsistent : EIVerdictValue::kInconsistent,
                  MakeTrace(line_answer->rule, line_answer->span, line_answer->confidence));
  }

  return finish(EIVerdictValue::kUnparseable, NoMatch());
}

RankParse ResponseParser::ParseRank(std::string_view raw_text) const {
  const std::string text = AsciiLower(raw_text);

  // Claims that both or neither candidate is consistent are failures.
  if (const auto invalid = FindAny(text, lexicon_.rank_invalid); !invalid.empty()) {
    return RankParse{RankChoice::kInvalid, MakeTrace("both-or-neither", invalid.front(), TraceConfidence::kExact)};
  }

  auto collect = [&](const std::regex& re, std::vector<LetterHit>& hits) {
    ForEachRegex(text, re, [&](const std::smatch& m) {
      const auto begin = static_cast<std::size_t>(m.position(0));
      hits.push_back({{begin, begin + static_cast<std::size_t>(m.length(0))}, LetterOf(m.str(1))});
    });
  };

  std::vector<LetterHit> answers;
  collect(RankAnswerMarker(), answers);
  std::size_t offset = 0;
  for (std::string_view line : SplitLines(text)) {
    const std::string_view trimmed = Trim(line);
    const std::string owned(trimmed);
    std::smatch m;
    if (std::regex_search(owned, m, RankLineLetter())) {
      const std::size_t begin = offset + static_cast<std::size_t>(trimmed.data() - line.data());
      answers.push_back({{begin, begin + static_cast<std::size_t>(m.length(0))}, LetterOf(m.str(1))});
    }
    offset += line.size() + 1;
  }
  if (auto resolved = ResolveTier(answers, "answer-marker", TraceConfidence::kExact)) return *resolved;

  std::vector<LetterHit> comparative;
  collect(RankComparative(), comparative);
  collect(RankComparativeTrailing(), comparative);
  collect(RankChooseMarker(), comparative);
  if (auto resolved = ResolveTier(comparative, "comparative", TraceConfidence::kHeuristic)) return *resolved;

  std::vector<LetterHit> plain;
  collect(RankPlainEndorse(), plain);
  if (auto resolved = ResolveTier(plain, "endorsement", TraceConfidence::kHeuristic)) return *resolved;

  return RankParse{RankChoice::kInvalid, NoMatch()};
}

RatingParse ResponseParser::ParseRating(std::string_view raw_text) const {
  const std::string text = AsciiLower(raw_text);
  struct Number {
    Span span;
    double value;
  };
  std::vector<Number> numbers;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i + 1 < text.size() && text[i] == '.' && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    }
    const bool glued_before =
        begin > 0 && (std::isalpha(static_cast<unsigned char>(text[begin - 1])) || text[begin - 1] == '.');
    const bool glued_after = i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]));
    if (glued_before || glued_after) continue;
    double value = 0.0;
    std::from_chars(text.data() + begin, text.data() + i, value);
    numbers.push_back({{begin, i}, value});
  }

  auto preceded_by = [&](std::size_t pos, std::string_view word) {
    std::size_t end = pos;
    while (end > 0 && IsSpace(text[end - 1])) --end;
    return end >= word.size() && std::string_view(text).substr(end - word.size(), word.size()) == word &&
           (end == word.size() || !IsWordByte(text[end - word.size() - 1]) || !IsWordByte(word.front()));
  };
  static const std::regex kScaleTail(R"(^\s*(?:to|-|–|and)\s*$)");

  std::vector<bool> skip(numbers.size(), false);
  for (std::size_t k = 0; k < numbers.size(); ++k) {
    if (preceded_by(numbers[k].span.begin, "/") || preceded_by(numbers[k].span.begin, "out of")) skip[k] = true;
    if (k + 1 < numbers.size() && (numbers[k].value == 0.0 || numbers[k].value == 1.0) &&
        numbers[k + 1].value == 10.0) {
      const std::string between =
          text.substr(numbers[k].span.end, numbers[k + 1].span.begin - numbers[k].span.end);
      if (std::regex_match(between, kScaleTail)) {
        skip[k] = true;
        skip[k + 1] = true;
      }
    }
  }

  for (std::size_t k = 0; k < numbers.size(); ++k) {
    if (skip[k]) continue;
    const auto& n = numbers[k];
    RatingParse out;
    out.verdict.score = n.value;
    out.verdict.in_range = n.value >= kRatingMin && n.value <= kRatingMax;
    const bool bare = Trim(text) == std::string_view(text).substr(n.span.begin, n.span.end - n.span.begin);
    out.trace = MakeTrace(out.verdict.in_range ? "first-number" : "out-of-range-number", n.span,
                          bare ? TraceConfidence::kExact : TraceConfidence::kHeuristic);
    return out;
  }
  return RatingParse{RatingVerdict{std::nullopt, false}, NoMatch()};
}

}  // namespace fcjudge
