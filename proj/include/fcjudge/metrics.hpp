// Scoring math for all three tasks. Everything is pure and deterministic;
// undefined quantities (an empty class, a constant vector) raise
// InvalidInput instead of producing NaN.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "fcjudge/core_model.hpp"

namespace fcjudge {

ConfusionMatrix BuildConfusion(std::span<const ConsistencyLabel> predictions,
                               std::span<const ConsistencyLabel> golds,
                               ConsistencyLabel positive_class);

/// Maps unparseable verdicts to inconsistent before counting.
ConfusionMatrix BuildConfusion(std::span<const EIVerdict> verdicts,
                               std::span<const ConsistencyLabel> golds,
                               ConsistencyLabel positive_class);

/// Recall of the positive class, tp / (tp + fn).
double Sensitivity(const ConfusionMatrix& cm);
/// Recall of the negative class, tn / (tn + fp).
double Specificity(const ConfusionMatrix& cm);
/// Mean of sensitivity and specificity.
double BalancedAccuracy(const ConfusionMatrix& cm);

/// Fraction of choices equal to the gold slot; Invalid always counts as wrong.
double RankingAccuracy(std::span<const RankChoice> choices,
                       std::span<const SlotPosition> gold_positions);

double Pearson(std::span<const double> x, std::span<const double> y);
/// Pearson over mid-ranks (ties share the average rank).
double Spearman(std::span<const double> x, std::span<const double> y);
/// Tie-corrected Kendall tau-b, computed in O(n log n).
double KendallTau(std::span<const double> x, std::span<const double> y);

CorrelationReport Correlate(std::span<const double> x, std::span<const double> y);

/// 1-based average ranks.
std::vector<double> MidRanks(std::span<const double> values);

struct ThresholdResult {
  double threshold = 0.0;
  double validation_bacc = 0.0;
  std::vector<double> sweep_grid;
};

/// Predicts consistent when score >= threshold. The grid holds the lowest
/// score, every midpoint between adjacent distinct scores, and a value just
/// above the highest score; the best balanced accuracy wins, ties going to
/// the smaller threshold.
ThresholdResult SelectThreshold(std::span<const double> scores,
                                std::span<const ConsistencyLabel> golds,
                                ConsistencyLabel positive_class);

std::vector<ConsistencyLabel> ApplyThreshold(std::span<const double> scores, double threshold);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap at 95%. Resample indices are drawn serially from a
/// mt19937_64 seeded with `seed`, so the result depends only on the inputs.
/// Resamples on which the statistic throws InvalidInput (e.g. a class went
/// missing) are skipped.
template <typename Record>
Interval BootstrapInterval(std::span<const Record> records,
                           const std::function<double(std::span<const Record>)>& statistic,
                           std::size_t iterations, std::uint64_t seed);

/// Linear-interpolated percentile of sorted data, q in [0, 1].
double Percentile(std::span<const double> sorted, double q);

inline constexpr std::size_t kMinBootstrapIterations = 100;

template <typename Record>
Interval BootstrapInterval(std::span<const Record> records,
                           const std::function<double(std::span<const Record>)>& statistic,
                           std::size_t iterations, std::uint64_t seed) {
  if (records.size() < 2) throw InvalidInput("bootstrap needs at least two records");
  if (iterations < kMinBootstrapIterations) {
    throw InvalidInput("bootstrap needs at least 100 iterations");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
  std::vector<double> stats;
  stats.reserve(iterations);
  std::vector<Record> sample(records.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    for (auto& slot : sample) slot = records[pick(rng)];
    try {
      stats.push_back(statistic(std::span<const Record>(sample)));
    } catch (const InvalidInput&) {
    }
  }
  if (stats.empty()) throw InvalidInput("statistic undefined on every bootstrap resample");
  std::sort(stats.begin(), stats.end());
  return Interval{Percentile(stats, 0.025), Percentile(stats, 0.975)};
}

}  // namespace fcjudge
