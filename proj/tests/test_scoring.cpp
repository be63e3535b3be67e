#include <gtest/gtest.h>

#include <cmath>

#include "fdia/scoring.hpp"
#include "oracles.hpp"

using namespace fdia;

TEST(Dtw, Examples) {
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  EXPECT_EQ(dtw_distance(a, b), 2.0);
  EXPECT_EQ(dtw_distance(a, a), 0.0);
  const std::vector<double> one{5};
  EXPECT_EQ(dtw_distance(one, a), 4.0 + 3.0 + 2.0);
  EXPECT_THROW(dtw_distance(std::vector<double>{}, a), std::invalid_argument);
}

TEST(Dtw, MatchesExhaustiveWarping) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(8), m = 1 + rng.below(8);
    std::vector<double> a(n), b(m);
    const bool integer = trial % 2 == 0;
    for (auto* v : {&a, &b})
      for (auto& x : *v) x = integer ? static_cast<double>(rng.below(10)) - 5.0 : rng.normal();
    const double fast = dtw_distance(a, b), slow = oracle::dtw_exhaustive(a, b);
    if (integer) {
      EXPECT_EQ(fast, slow);
    } else {
      EXPECT_NEAR(fast, slow, 1e-12);
    }
    EXPECT_NEAR(dtw_distance(b, a), fast, 1e-12);
    EXPECT_GE(fast, 0.0);
  }
}

TEST(ZScore, StandardizesAndHandlesConstants) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(2 + rng.below(200));
    for (auto& x : v) x = 10.0 * rng.normal() + 3.0;
    const auto z = zscore(v);
    const Moments m = moments(z);
    EXPECT_LE(std::abs(m.mean), 1e-9);
    EXPECT_LE(std::abs(m.stddev - 1.0), 1e-9);
  }
  const std::vector<double> c(5, 2.5);
  for (double x : zscore(c)) EXPECT_EQ(x, 0.0);
}

TEST(Threshold, ThreeSigmaExample) {
  std::vector<double> v(100, 0.0);
  v.back() = 50.0;
  const Moments m = moments(v);
  EXPECT_DOUBLE_EQ(m.mean, 0.5);
  EXPECT_NEAR(m.stddev, std::sqrt(24.75), 1e-12);
  EXPECT_NEAR(threshold_three_sigma(v), 0.5 + 3 * std::sqrt(24.75), 1e-12);
  const auto flags = apply_threshold(v, threshold_three_sigma(v));
  EXPECT_EQ(std::count(flags.begin(), flags.end(), true), 1);
  EXPECT_TRUE(flags.back());
}

TEST(Threshold, IgnoresNonFiniteScores) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> v{ninf, 1.0, 3.0, ninf};
  EXPECT_DOUBLE_EQ(threshold_three_sigma(v), 2.0 + 3.0);
}

TEST(Threshold, RollingMatchesDirectWindow) {
  Rng rng(2);
  std::vector<double> v(300);
  for (auto& x : v) x = rng.normal();
  const auto local = rolling_three_sigma(v, 50);
  for (std::size_t i : {0u, 10u, 49u, 50u, 200u, 299u}) {
    const std::size_t lo = i + 1 >= 50 ? i + 1 - 50 : 0;
    std::span<const double> win(v.data() + lo, i + 1 - lo);
    EXPECT_NEAR(local[i], threshold_three_sigma(win), 1e-9) << i;
  }
}

TEST(AnomalyScore, ProductOfStandardizedScores) {
  const std::vector<double> re{1, 2, 3, 10}, cs{0.5, 0.4, 0.6, -3};
  const auto s = anomaly_scores(re, cs, CriticOrientation::negated);
  const auto zr = zscore(re);
  std::vector<double> neg{-0.5, -0.4, -0.6, 3};
  const auto zc = zscore(neg);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(s.a[i], zr[i] * zc[i]);
  EXPECT_EQ(std::max_element(s.a.begin(), s.a.end()) - s.a.begin(), 3);
  const auto raw = anomaly_scores(re, cs, CriticOrientation::raw);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(raw.a[i], -s.a[i]);
  EXPECT_THROW(anomaly_scores(re, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(AnomalyScore, InvariantUnderPositiveAffineMaps) {
  Rng rng(5);
  std::vector<double> re(40), cs(40);
  for (auto& x : re) x = std::abs(rng.normal());
  for (auto& x : cs) x = rng.normal();
  const auto base = anomaly_scores(re, cs);
  std::vector<double> re2(re), cs2(cs);
  for (auto& x : re2) x = 3.0 * x + 7.0;
  for (auto& x : cs2) x = 0.25 * x - 2.0;
  const auto moved = anomaly_scores(re2, cs2);
  for (std::size_t i = 0; i < re.size(); ++i) EXPECT_NEAR(moved.a[i], base.a[i], 1e-9);
}

TEST(WindowsToPoints, Aggregations) {
  const std::vector<double> s{1.0, 5.0, 2.0};
  const std::vector<std::size_t> starts{0, 2, 4};
  const double ninf = -std::numeric_limits<double>::infinity();
  // Windows of 3 over a length-9 series: [0,3), [2,5), [4,7).
  EXPECT_EQ(windows_to_points(s, starts, 3, 9, Aggregation::max),
            (std::vector<double>{1, 1, 5, 5, 5, 2, 2, ninf, ninf}));
  EXPECT_EQ(windows_to_points(s, starts, 3, 9, Aggregation::min),
            (std::vector<double>{1, 1, 1, 5, 2, 2, 2, ninf, ninf}));
  EXPECT_EQ(windows_to_points(s, starts, 3, 9, Aggregation::mean),
            (std::vector<double>{1, 1, 3, 5, 3.5, 2, 2, ninf, ninf}));
  EXPECT_EQ(windows_to_points(s, starts, 3, 9, Aggregation::center),
            (std::vector<double>{1, 1, 1, 5, 5, 2, 2, ninf, ninf}));
  EXPECT_THROW(windows_to_points(s, std::vector<std::size_t>{0}, 3, 9), std::invalid_argument);
}

TEST(Detect, IdentityModelNeverFlags) {
  std::vector<double> v(200);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * static_cast<double>(i));
  const IdentityWindowModel model(10);
  const Detection d = detect(model, make_series(v));
  EXPECT_EQ(d.window_starts.size(), window_count(200, 10, 1));
  for (double re : d.window_scores.re) EXPECT_EQ(re, 0.0);
  EXPECT_EQ(std::count(d.flags.begin(), d.flags.end(), true), 0);
  ASSERT_EQ(d.flags.size(), v.size());
}

TEST(Detect, ReconstructionOnlyIgnoresCritic) {
  std::vector<double> v(100, 0.0);
  const IdentityWindowModel model(5, true, 1.0);
  DetectOptions opt;
  opt.reconstruction_only = true;
  const Detection d = detect(model, make_series(v), opt);
  EXPECT_TRUE(d.window_scores.cs.empty());
  EXPECT_THROW(detect(model, make_series(std::vector<double>(3, 0.0))), std::invalid_argument);
}

namespace {

// Reconstructs every window as all zeros, so RE grows with the window's magnitude.
class ZeroModel : public WindowModel {
 public:
  std::size_t window_size() const override { return 8; }
  nn::Matrix reconstruct(const nn::Matrix& w) const override {
    return nn::Matrix::Zero(w.rows(), w.cols());
  }
};

}  // namespace

TEST(Detect, FlagsAnInjectedSpike) {
  std::vector<double> v(400, 0.0);
  Rng rng(4);
  for (auto& x : v) x = 0.01 * rng.normal();
  for (std::size_t i = 200; i < 204; ++i) v[i] = 1.0;
  const Detection d = detect(ZeroModel{}, make_series(v));
  EXPECT_TRUE(d.flags[201]);
  EXPECT_FALSE(d.flags[50]);
  EXPECT_FALSE(d.flags[350]);
}
