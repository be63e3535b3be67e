#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fdia {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

Confusion confusion(const std::vector<bool>& predicted, const std::vector<bool>& truth);

/// A ratio whose denominator may vanish. Empty denominators give value 0 and
/// set `degenerate`.
struct Metric {
  double value = 0.0;
  bool degenerate = false;
};

Metric accuracy(const Confusion& c);
Metric precision(const Confusion& c);
Metric recall(const Confusion& c);
Metric f1(const Confusion& c);

struct MetricRow {
  Confusion counts;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
MetricRow evaluate(const std::vector<bool>& predicted, const std::vector<bool>& truth);

/// Area under the ROC curve of `scores` against `truth` (ties count half).
/// Non-finite scores rank below every finite one.
double roc_auc(std::span<const double> scores, const std::vector<bool>& truth);

}  // namespace fdia
