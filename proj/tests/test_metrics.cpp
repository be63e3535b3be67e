#include <gtest/gtest.h>

#include "fdia/metrics.hpp"
#include "oracles.hpp"

using namespace fdia;

TEST(Metrics, KnownConfusion) {
  const std::vector<bool> pred{true, true, false, false, true};
  const std::vector<bool> truth{true, false, true, false, true};
  const Confusion c = confusion(pred, truth);
  EXPECT_EQ(c, (Confusion{2, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(accuracy(c).value, 0.6);
  EXPECT_DOUBLE_EQ(precision(c).value, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(recall(c).value, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f1(c).value, 2.0 / 3.0);
}

TEST(Metrics, DegenerateDenominators) {
  const Confusion none = confusion({false, false}, {false, false});
  EXPECT_TRUE(precision(none).degenerate);
  EXPECT_TRUE(recall(none).degenerate);
  EXPECT_EQ(f1(none).value, 0.0);
  EXPECT_EQ(accuracy(none).value, 1.0);
  EXPECT_THROW(confusion({true}, {true, false}), std::invalid_argument);
}

TEST(Metrics, RandomPairsMatchOracle) {
  Rng rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<bool> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.uniform() < 0.3;
      truth[i] = rng.uniform() < 0.2;
    }
    const auto expect = oracle::metrics(oracle::count(pred, truth));
    const MetricRow row = evaluate(pred, truth);
    EXPECT_EQ(row.accuracy, expect[0]);
    EXPECT_EQ(row.precision, expect[1]);
    EXPECT_EQ(row.recall, expect[2]);
    EXPECT_EQ(row.f1, expect[3]);
    EXPECT_EQ(row.counts.total(), n);
  }
}

TEST(RocAuc, KnownValues) {
  const std::vector<bool> truth{false, false, true, true};
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, truth), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, truth), 0.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, truth), 0.5);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, truth), 0.75);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, {true, true}), std::invalid_argument);
}

TEST(RocAuc, MatchesPairCounting) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.below(40);
    std::vector<double> s(n);
    std::vector<bool> t(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(6));
      t[i] = i < 2 ? i == 0 : rng.uniform() < 0.4;
    }
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (t[i] && !t[j]) {
          pairs += 1;
          wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    EXPECT_NEAR(roc_auc(s, t), wins / pairs, 1e-12);
  }
}
