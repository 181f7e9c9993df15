#include "fcjudge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace fcjudge {
namespace {

void RequireAligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidInput(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
}

void RequireCorrelationInput(std::span<const double> x, std::span<const double> y) {
  RequireAligned(x.size(), y.size(), "correlation");
  if (x.size() < 2) throw InvalidInput("correlation needs at least two samples");
}

double Clamp(double r) { return std::clamp(r, -1.0, 1.0); }

// Strict inversions in values[lo, hi); sorts the range as a side effect.
std::uint64_t CountInversions(std::vector<double>& values, std::vector<double>& buffer,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = CountInversions(values, buffer, lo, mid) + CountInversions(values, buffer, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (values[j] < values[i]) {
      count += mid - i;
      buffer[k++] = values[j++];
    } else {
      buffer[k++] = values[i++];
    }
  }
  while (i < mid) buffer[k++] = values[i++];
  while (j < hi) buffer[k++] = values[j++];
  std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo), buffer.begin() + static_cast<std::ptrdiff_t>(hi),
            values.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

// Sum over tie groups of t*(t-1)/2 in an already sorted range.
std::uint64_t TiedPairs(std::span<const double> sorted) {
  std::uint64_t total = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const std::uint64_t t = j - i;
    total += t * (t - 1) / 2;
    i = j;
  }
  return total;
}

}  // namespace

ConfusionMatrix BuildConfusion(std::span<const ConsistencyLabel> predictions,
                               std::span<const ConsistencyLabel> golds,
                               ConsistencyLabel positive_class) {
  RequireAligned(predictions.size(), golds.size(), "confusion matrix");
  ConfusionMatrix cm;
  cm.positive_class = positive_class;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool gold_pos = golds[i] == positive_class;
    const bool pred_pos = predictions[i] == positive_class;
    if (gold_pos && pred_pos) ++cm.tp;
    else if (gold_pos) ++cm.fn;
    else if (pred_pos) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

ConfusionMatrix BuildConfusion(std::span<const EIVerdict> verdicts,
                               std::span<const ConsistencyLabel> golds,
                               ConsistencyLabel positive_class) {
  std::vector<ConsistencyLabel> predictions;
  predictions.reserve(verdicts.size());
  for (const auto& v : verdicts) predictions.push_back(v.ScoredLabel());
  return BuildConfusion(predictions, golds, positive_class);
}

double Sensitivity(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) {
    throw InvalidInput(fmt::format("sensitivity undefined: no gold {} records",
                                   ToString(cm.positive_class)));
  }
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

double Specificity(const ConfusionMatrix& cm) {
  if (cm.tn + cm.fp == 0) {
    throw InvalidInput(fmt::format("specificity undefined: no gold {} records",
                                   ToString(Opposite(cm.positive_class))));
  }
  return static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
}

double BalancedAccuracy(const ConfusionMatrix& cm) {
  return 0.5 * (Sensitivity(cm) + Specificity(cm));
}

double RankingAccuracy(std::span<const RankChoice> choices,
                       std::span<const SlotPosition> gold_positions) {
  RequireAligned(choices.size(), gold_positions.size(), "ranking accuracy");
  if (choices.empty()) throw InvalidInput("ranking accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    const RankChoice expected = gold_positions[i] == SlotPosition::kA ? RankChoice::kA : RankChoice::kB;
    correct += choices[i] == expected;
  }
  return static_cast<double>(correct) / static_cast<double>(choices.size());
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  RequireCorrelationInput(x, y);
  const double n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw InvalidInput("pearson undefined: zero variance");
  return Clamp(sxy / std::sqrt(sxx * syy));
}

std::vector<double> MidRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  RequireCorrelationInput(x, y);
  const auto rx = MidRanks(x);
  const auto ry = MidRanks(y);
  try {
    return Pearson(rx, ry);
  } catch (const InvalidInput&) {
    throw InvalidInput("spearman undefined: all values tied");
  }
}

// Knight's algorithm: sort by (x, y), count joint ties and x ties, then count
// swaps needed to sort y.
double KendallTau(std::span<const double> x, std::span<const double> y) {
  RequireCorrelationInput(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t tied_x = TiedPairs(xs);
  std::uint64_t tied_xy = 0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && xs[j] == xs[i] && ys[j] == ys[i]) ++j;
      const std::uint64_t t = j - i;
      tied_xy += t * (t - 1) / 2;
      i = j;
    }
  }
  std::vector<double> buffer(n);
  const std::uint64_t swaps = CountInversions(ys, buffer, 0, n);  // ys ends sorted
  const std::uint64_t tied_y = TiedPairs(ys);

  const double n0 = static_cast<double>(total);
  const double n1 = static_cast<double>(tied_x);
  const double n2 = static_cast<double>(tied_y);
  if (tied_x == total || tied_y == total) throw InvalidInput("kendall tau undefined: all pairs tied");
  // concordant - discordant = total - tied_x - tied_y + tied_xy - 2 * swaps
  const double numerator = n0 - n1 - n2 + static_cast<double>(tied_xy) - 2.0 * static_cast<double>(swaps);
  return Clamp(numerator / std::sqrt((n0 - n1) * (n0 - n2)));
}

CorrelationReport Correlate(std::span<const double> x, std::span<const double> y) {
  return CorrelationReport{Pearson(x, y), Spearman(x, y), KendallTau(x, y), x.size()};
}

std::vector<ConsistencyLabel> ApplyThreshold(std::span<const double> scores, double threshold) {
  std::vector<ConsistencyLabel> out;
  out.reserve(scores.size());
  for (double s : scores) {
    out.push_back(s >= threshold ? ConsistencyLabel::kConsistent : ConsistencyLabel::kInconsistent);
  }
  return out;
}

ThresholdResult SelectThreshold(std::span<const double> scores,
                                std::span<const ConsistencyLabel> golds,
                                ConsistencyLabel positive_class) {
  RequireAligned(scores.size(), golds.size(), "threshold selection");
  const bool has_consistent = std::find(golds.begin(), golds.end(), ConsistencyLabel::kConsistent) != golds.end();
  const bool has_inconsistent =
      std::find(golds.begin(), golds.end(), ConsistencyLabel::kInconsistent) != golds.end();
  if (!has_consistent || !has_inconsistent) {
    throw InvalidInput("threshold selection needs both classes in the validation set");
  }

  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  ThresholdResult result;
  result.sweep_grid.push_back(distinct.front());
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    result.sweep_grid.push_back(distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0);
  }
  result.sweep_grid.push_back(std::nextafter(distinct.back(), std::numeric_limits<double>::infinity()));

  bool first = true;
  for (double t : result.sweep_grid) {  // ascending, so strict > keeps the smallest on ties
    const double bacc = BalancedAccuracy(BuildConfusion(ApplyThreshold(scores, t), golds, positive_class));
    if (first || bacc > result.validation_bacc) {
      result.threshold = t;
      result.validation_bacc = bacc;
      first = false;
    }
  }
  return result;
}

double Percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidInput("percentile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace fcjudge
