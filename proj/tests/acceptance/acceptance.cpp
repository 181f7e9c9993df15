// Acceptance checks, one line per criterion. Mock backend only; no network.
// Exit status is non-zero when any gating criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fcjudge/datasets.hpp"
#include "fcjudge/lexical_probe.hpp"
#include "fcjudge/metrics.hpp"
#include "fcjudge/prompts.hpp"
#include "fcjudge/response_parser.hpp"
#include "fcjudge/runner.hpp"
#include "fcjudge/text_util.hpp"
#include "oracles/oracles.hpp"
#include "support/test_support.hpp"

using namespace fcjudge;
using testing_support::AssetPath;
using testing_support::DataPath;
using testing_support::TempDir;

namespace {

// Collects failures for one criterion; the first few are printed.
struct Check {
  std::vector<std::string> failures;
  std::string detail;
  void Expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_ms;
  std::function<void(Check&)> body;
};

bool Close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

void MetricMath(Check& c) {
  std::mt19937_64 rng(20230418);
  std::size_t checked = 0, degenerate = 0;
  for (int instance = 0; instance < 1500; ++instance) {
    const std::size_t n = 2 + rng() % 19;
    std::vector<double> x(n), y(n);
    const bool discrete = instance % 2 == 0;  // half the cases are tie-heavy
    std::uniform_real_distribution<double> u(-10, 10);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = discrete ? static_cast<double>(rng() % 5) : u(rng);
      y[i] = discrete ? static_cast<double>(rng() % 4) : u(rng);
    }
    const auto rx = oracle::MidRanks(x);
    const auto ry = oracle::MidRanks(y);
    const bool constant = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
                          std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (constant) {
      ++degenerate;
      bool threw = false;
      try {
        Pearson(x, y);
      } catch (const InvalidInput&) {
        threw = true;
      }
      c.Expect(threw, fmt::format("instance {}: constant vector accepted", instance));
      continue;
    }
    ++checked;
    const double p = Pearson(x, y), s = Spearman(x, y), k = KendallTau(x, y);
    const double op = oracle::Pearson(x, y), os = oracle::Spearman(x, y), ok = oracle::KendallTauB(x, y);
    c.Expect(Close(p, op, 1e-9), fmt::format("instance {}: pearson {} vs oracle {}", instance, p, op));
    c.Expect(Close(s, os, 1e-9), fmt::format("instance {}: spearman {} vs oracle {}", instance, s, os));
    c.Expect(Close(k, ok, 1e-9), fmt::format("instance {}: kendall {} vs oracle {}", instance, k, ok));
    const auto mr = MidRanks(x);
    for (std::size_t i = 0; i < n; ++i) c.Expect(mr[i] == rx[i], fmt::format("instance {}: mid-rank", instance));
    (void)ry;
  }
  c.Expect(checked >= 1000, fmt::format("only {} non-degenerate instances", checked));
  c.detail = fmt::format("{} instances vs oracles, {} degenerate rejected", checked, degenerate);
}

void BalancedAccuracyExhaustive(Check& c) {
  std::size_t cases = 0;
  for (std::uint64_t tp = 0; tp <= 12; ++tp) {
    for (std::uint64_t fp = 0; tp + fp <= 12; ++fp) {
      for (std::uint64_t tn = 0; tp + fp + tn <= 12; ++tn) {
        for (std::uint64_t fn = 0; tp + fp + tn + fn <= 12; ++fn) {
          const ConfusionMatrix cm{tp, fp, tn, fn, ConsistencyLabel::kInconsistent};
          const bool defined = tp + fn > 0 && tn + fp > 0;
          if (!defined) {
            bool threw = false;
            try {
              BalancedAccuracy(cm);
            } catch (const InvalidInput&) {
              threw = true;
            }
            c.Expect(threw, fmt::format("({},{},{},{}) undefined but accepted", tp, fp, tn, fn));
            continue;
          }
          ++cases;
          const double got = BalancedAccuracy(cm);
          const double want = oracle::BalancedAccuracy(tp, fp, tn, fn);
          c.Expect(Close(got, want, 1e-15), fmt::format("({},{},{},{}): {} vs {}", tp, fp, tn, fn, got, want));
          const double swapped = BalancedAccuracy(cm.WithPositiveClass(ConsistencyLabel::kConsistent));
          c.Expect(Close(got, swapped, 1e-15), fmt::format("({},{},{},{}): swap changed value", tp, fp, tn, fn));
        }
      }
    }
  }
  c.detail = fmt::format("{} defined matrices", cases);
}

void ParserCorpus(Check& c) {
  const ResponseParser parser(Lexicon::Load(AssetPath("lexicon")));
  std::size_t total = 0;
  const std::string corpus = ReadFile(DataPath("parser/corpus.jsonl"));
  for (std::string_view line : SplitLines(corpus)) {
    if (Trim(line).empty()) continue;
    ++total;
    const auto entry = nlohmann::json::parse(line);
    const auto task = entry.at("task").get<std::string>();
    const auto text = entry.at("raw_text").get<std::string>();
    const auto& expected = entry.at("expected");
    const auto note = entry.value("note", "");
    std::string got;
    if (task == "ei_zs" || task == "ei_cot") {
      got = ToString(parser.ParseEI(text, task == "ei_zs" ? ParseMode::kZeroShot : ParseMode::kChainOfThought)
                         .verdict.value);
      c.Expect(got == expected.get<std::string>(), fmt::format("[{}] {}: got {}", task, note, got));
    } else if (task == "ranking") {
      got = ToString(parser.ParseRank(text).choice);
      c.Expect(got == expected.get<std::string>(), fmt::format("[{}] {}: got {}", task, note, got));
    } else if (task == "rating") {
      const auto r = parser.ParseRating(text);
      if (expected.is_null()) {
        c.Expect(!r.verdict.score, fmt::format("[rating] {}: expected no number", note));
      } else {
        const double want = expected.get<double>();
        c.Expect(r.verdict.score && *r.verdict.score == want,
                 fmt::format("[rating] {}: got {}", note, r.verdict.score ? FormatDouble(*r.verdict.score) : "none"));
        c.Expect(r.verdict.in_range == (want >= kRatingMin && want <= kRatingMax),
                 fmt::format("[rating] {}: in_range flag wrong", note));
      }
    } else {
      c.Expect(false, "unknown task " + task);
    }
  }
  c.Expect(total >= 50, fmt::format("corpus has only {} entries", total));
  c.detail = fmt::format("{} hand-labelled responses", total);
}

void EndToEnd(Check& c) {
  TempDir dir;
  RunConfig config;
  config.task = PromptTask::kEIZeroShot;
  config.manifest_path = DataPath("ei/planted40_manifest.json");
  config.backend.mock_fixture = DataPath("ei/planted40_mock.json");
  config.backend.cache_dir = dir / "cache";
  config.backend.max_in_flight = 8;
  config.asset_dir = AssetPath();
  config.output_dir = dir / "first";
  const auto first = Run(config);
  const auto& m = first.metrics;
  c.Expect(m.at("ei.planted.bacc") == "0.71875", "bACC " + m.at("ei.planted.bacc"));
  c.Expect(m.at("ei.planted.sensitivity") == "0.5", "sensitivity " + m.at("ei.planted.sensitivity"));
  c.Expect(m.at("ei.planted.specificity") == "0.9375", "specificity " + m.at("ei.planted.specificity"));

  // Replay: a backend that would fail every call, so only cache hits work.
  class Unreachable : public ChatBackend {
   public:
    Completion Complete(const JudgeRequest&) override { throw std::runtime_error("backend called during replay"); }
    std::string Name() const override { return "unreachable"; }
  };
  config.backend.resume = true;
  config.output_dir = dir / "replay";
  const auto replay = Run(config, std::make_shared<Unreachable>());
  c.Expect(replay.batch.cache_hits == 40, fmt::format("{} cache hits", replay.batch.cache_hits));
  c.Expect(ReadFile(dir / "first/metrics.txt") == ReadFile(dir / "replay/metrics.txt"),
           "metrics files differ after replay");
  c.detail = fmt::format("bACC {} sens {} spec {}, replay byte-identical", m.at("ei.planted.bacc"),
                         m.at("ei.planted.sensitivity"), m.at("ei.planted.specificity"));
}

void ThresholdSelection(Check& c) {
  std::mt19937_64 rng(99);
  for (int fixture = 0; fixture < 25; ++fixture) {
    // Scores are hundredths; inconsistent ones never exceed the gap's lower
    // edge and consistent ones never fall below its upper edge.
    const int low_i = 20 + 2 * fixture;
    const int high_i = low_i + 5 + fixture % 5;
    const double gap_low = low_i / 100.0, gap_high = high_i / 100.0;
    const std::size_t n_inc = 3 + rng() % 10, n_con = 3 + rng() % 10;
    std::vector<std::pair<int, bool>> planted;
    for (std::size_t i = 0; i < n_inc; ++i) planted.emplace_back(i == 0 ? low_i : int(rng() % (low_i + 1)), false);
    for (std::size_t i = 0; i < n_con; ++i) {
      planted.emplace_back(i == 0 ? high_i : high_i + int(rng() % (101 - high_i)), true);
    }
    std::shuffle(planted.begin(), planted.end(), rng);
    std::vector<double> scores;
    std::vector<ConsistencyLabel> golds;
    std::vector<bool> consistent;
    for (const auto& [score, con] : planted) {
      scores.push_back(score / 100.0);
      consistent.push_back(con);
      golds.push_back(con ? ConsistencyLabel::kConsistent : ConsistencyLabel::kInconsistent);
    }
    const auto positive = fixture % 2 ? ConsistencyLabel::kConsistent : ConsistencyLabel::kInconsistent;
    const auto r = SelectThreshold(scores, golds, positive);
    c.Expect(r.threshold > gap_low && r.threshold <= gap_high,
             fmt::format("fixture {}: threshold {} outside gap ({}, {}]", fixture, r.threshold, gap_low, gap_high));
    const double chosen = oracle::ThresholdBacc(scores, consistent, r.threshold);
    c.Expect(Close(chosen, r.validation_bacc, 1e-12), fmt::format("fixture {}: reported bACC mismatch", fixture));
    for (double t : oracle::AllCutPoints(scores)) {
      c.Expect(oracle::ThresholdBacc(scores, consistent, t) <= chosen + 1e-12,
               fmt::format("fixture {}: cut {} beats the selection", fixture, t));
    }
    for (double t : r.sweep_grid) {
      c.Expect(oracle::ThresholdBacc(scores, consistent, t) <= chosen + 1e-12,
               fmt::format("fixture {}: grid point {} beats the selection", fixture, t));
    }
  }
  c.detail = "25 planted-gap fixtures, exhaustive cut-point check";
}

void DatasetConformance(Check& c) {
  std::size_t checked = 0;
  const char* upstream = std::getenv("FCJUDGE_SUMMAC_DIR");
  std::vector<DatasetManifest> manifests;
  std::string source;
  if (upstream && *upstream) {
    // <dir>/<dataset>_test.jsonl as written by `fcjudge import --format summac`.
    source = std::string("upstream files in ") + upstream;
    for (const auto& stats : kBenchmarkStats) {
      DatasetManifest m;
      m.name = std::string(ToString(stats.dataset));
      m.dataset = stats.dataset;
      m.path = (std::filesystem::path(upstream) / (AsciiLower(m.name) + "_test.jsonl")).string();
      m.expected_count = stats.test_size;
      manifests.push_back(m);
    }
  } else {
    source = "bundled miniature fixtures";
    manifests = LoadManifestFile(DataPath("ei/miniature_manifest.json"));
  }
  for (const auto& m : manifests) {
    const auto loaded = LoadEIDataset(m);
    const auto& stats = StatsFor(*m.dataset);
    c.Expect(loaded.records.size() == *m.expected_count,
             fmt::format("{}: {} records, expected {}", m.name, loaded.records.size(), *m.expected_count));
    const double pct = 100.0 * ConsistentRate(loaded.records);
    c.Expect(std::fabs(pct - stats.percent_consistent) <= 0.1 + 1e-9,
             fmt::format("{}: {:.2f}% consistent vs published {}", m.name, pct, stats.percent_consistent));
    ++checked;
  }
  // Published sizes themselves.
  c.Expect(StatsFor(Dataset::kFactCC).test_size == 503, "FactCC test size constant");
  c.Expect(StatsFor(Dataset::kFrank).test_size == 1575, "FRANK test size constant");
  c.Expect(checked == 6, fmt::format("{} datasets checked", checked));
  c.detail = fmt::format("{} datasets, {}", checked, source);
}

void LexicalProbe(Check& c) {
  const auto extractive = ComputeOverlapProfile("the council approved the plan",
                                                "On Monday the council approved the plan after a debate.");
  for (const auto& [n, f] : extractive.novel_ngram_fraction) c.Expect(f == 0.0, fmt::format("extractive n={}", n));
  c.Expect(extractive.novel_ngram_fraction.size() == 4, "extractive orders");
  c.Expect(extractive.longest_common_subsequence_ratio == 1.0, "extractive LCS ratio");
  const auto disjoint = ComputeOverlapProfile("red green blue yellow", "one two three four five six");
  for (const auto& [n, f] : disjoint.novel_ngram_fraction) c.Expect(f == 1.0, fmt::format("disjoint n={}", n));
  const auto bigram = ComputeOverlapProfile("a b c d", "a b x c d");
  c.Expect(bigram.novel_ngram_fraction.at(2) == 1.0 / 3.0, "bigram novelty is not 1/3");
  c.detail = "extractive, disjoint and hand-enumerated fixtures";
}

void PromptGolden(Check& c) {
  const auto templates = TemplateSet::Load(AssetPath("templates"));
  const std::pair<PromptTask, RenderedPrompt> renders[] = {
      {PromptTask::kEIZeroShot, RenderEIZeroShot(templates, "Doc.", "Sum.")},
      {PromptTask::kEIChainOfThought, RenderEIChainOfThought(templates, "Doc.", "Sum.")},
      {PromptTask::kRanking, RenderRanking(templates, "Doc.", "One.", "Two.")},
      {PromptTask::kRating, RenderRating(templates, "Doc.", "Sum.")},
  };
  const std::pair<PromptTask, const char*> phrases[] = {
      {PromptTask::kEIZeroShot, "Answer (yes or no):"},
      {PromptTask::kEIChainOfThought, "Explain your reasoning step by step"},
      {PromptTask::kRanking, "Answer (A or B):"},
      {PromptTask::kRating, "from 1 to 10"},
  };
  for (const auto& [task, prompt] : renders) {
    const auto golden = ReadFile(DataPath("golden/" + std::string(ToString(task)) + ".txt"));
    c.Expect(prompt.BlankedBody() + "\n" == golden, fmt::format("{} differs from golden file", ToString(task)));
  }
  for (const auto& [task, phrase] : phrases) {
    const auto golden = ReadFile(DataPath("golden/" + std::string(ToString(task)) + ".txt"));
    c.Expect(golden.find(phrase) != std::string::npos, fmt::format("{} lacks '{}'", ToString(task), phrase));
  }
  c.detail = "4 templates byte-identical after blanking";
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria = {
      {"AC1", "metric math matches brute-force oracles", 10000, MetricMath},
      {"AC2", "balanced accuracy exhaustive check", 5000, BalancedAccuracyExhaustive},
      {"AC3", "parser corpus agreement", 1000, ParserCorpus},
      {"AC4", "end-to-end determinism", 5000, EndToEnd},
      {"AC5", "threshold selection", 5000, ThresholdSelection},
      {"AC6", "dataset conformance", 10000, DatasetConformance},
      {"AC7", "lexical probe fixtures", 1000, LexicalProbe},
      {"AC8", "prompt golden files", 1000, PromptGolden},
  };
  bool all_ok = true;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (ms > criterion.budget_ms) {
      check.failures.push_back(fmt::format("took {:.0f} ms, budget {:.0f} ms", ms, criterion.budget_ms));
    }
    const bool ok = check.failures.empty();
    all_ok &= ok;
    std::cout << fmt::format("{} {} {} ({}; {:.1f} ms)\n", criterion.id, ok ? "PASS" : "FAIL", criterion.title,
                             check.detail, ms);
    for (std::size_t i = 0; i < check.failures.size() && i < 10; ++i) {
      std::cout << "    " << check.failures[i] << "\n";
    }
  }
  std::cout << "AC9 SKIP live-backend sample run (manual, non-gating; see scripts/live_sample.sh)\n";
  std::cout << (all_ok ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << "\n";
  return all_ok ? 0 : 1;
}
