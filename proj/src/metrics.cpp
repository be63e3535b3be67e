#include "fdia/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fdia {

Confusion confusion(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("confusion: " + std::to_string(predicted.size()) +
                                " predictions vs " + std::to_string(truth.size()) + " labels");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i]) {
      truth[i] ? ++c.tp : ++c.fp;
    } else {
      truth[i] ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

namespace {

Metric ratio(std::size_t num, std::size_t den) {
  if (den == 0) return {0.0, true};
  return {static_cast<double>(num) / static_cast<double>(den), false};
}

}  // namespace

Metric accuracy(const Confusion& c) { return ratio(c.tp + c.tn, c.total()); }
Metric precision(const Confusion& c) { return ratio(c.tp, c.tp + c.fp); }
Metric recall(const Confusion& c) { return ratio(c.tp, c.tp + c.fn); }

Metric f1(const Confusion& c) {
  const double p = precision(c).value;
  const double r = recall(c).value;
  if (p + r == 0.0) return {0.0, true};
  return {2.0 * p * r / (p + r), false};
}

MetricRow evaluate(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  MetricRow row;
  row.counts = confusion(predicted, truth);
  row.accuracy = accuracy(row.counts).value;
  row.precision = precision(row.counts).value;
  row.recall = recall(row.counts).value;
  row.f1 = f1(row.counts).value;
  return row;
}

double roc_auc(std::span<const double> scores, const std::vector<bool>& truth) {
  if (scores.size() != truth.size())
    throw std::invalid_argument("roc_auc: scores and labels differ in length");
  const std::size_t pos = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), true));
  const std::size_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("roc_auc needs both classes");
  auto key = [&](std::size_t i) {
    return std::isfinite(scores[i]) ? scores[i] : -std::numeric_limits<double>::max();
  };
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  // Mann-Whitney U with average ranks for ties.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && key(order[j]) == key(order[i])) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (truth[order[k]]) rank_sum += avg;
    i = j;
  }
  const double p = static_cast<double>(pos), n = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

}  // namespace fdia
