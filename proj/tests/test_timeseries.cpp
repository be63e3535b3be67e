#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "fdia/rng.hpp"
#include "fdia/timeseries.hpp"

using namespace fdia;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto dir = std::filesystem::temp_directory_path() / "fdia_tests";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Profile, ConstantWhenAmplitudeAndNoiseAreZero) {
  ProfileParams p;
  p.length = 50;
  p.daily_amplitude = 0.0;
  p.noise_std = 0.0;
  p.base = 2.5;
  for (double v : synthesize_profile(p).values) EXPECT_EQ(v, 2.5);
}

TEST(Profile, SameSeedIsBitIdentical) {
  ProfileParams p;
  EXPECT_EQ(synthesize_profile(p).values, synthesize_profile(p).values);
  ProfileParams q = p;
  q.seed = p.seed + 1;
  EXPECT_NE(synthesize_profile(p).values, synthesize_profile(q).values);
}

TEST(Profile, WeekLongMeanNearBase) {
  const auto s = synthesize_profile({});
  const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / s.size();
  EXPECT_EQ(s.size(), 10080u);
  EXPECT_NEAR(mean, 1.0, 0.05);
}

TEST(Normalization, FitCapturesRange) {
  const auto p = fit_normalizer(make_series({0, 5, 10}), -1, 1);
  EXPECT_EQ(p.x_min, 0);
  EXPECT_EQ(p.x_max, 10);
  EXPECT_EQ(p.low, -1);
  EXPECT_EQ(p.high, 1);
  EXPECT_THROW(fit_normalizer(make_series({4, 4, 4})), std::invalid_argument);
}

TEST(Normalization, KnownPoints) {
  const NormalizationParams p{0, 10, -1, 1};
  EXPECT_DOUBLE_EQ(p.apply(0), -1);
  EXPECT_DOUBLE_EQ(p.apply(10), 1);
  EXPECT_DOUBLE_EQ(p.apply(2.5), -0.5);
  EXPECT_DOUBLE_EQ(p.invert(-1), 0);
  EXPECT_DOUBLE_EQ(p.invert(0), 5);
  const auto n = normalize(make_series({0, 2.5, 10}), p);
  EXPECT_EQ(n.values, (std::vector<double>{-1, -0.5, 1}));
}

TEST(Normalization, RoundTripAndOrderProperty) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double lo = rng.uniform(-100, 100);
    const NormalizationParams p{lo, lo + rng.uniform(0.1, 50), -1, 1};
    std::vector<double> xs(20);
    for (auto& x : xs) x = rng.uniform(-200, 200);
    const auto back = denormalize(normalize(make_series(xs), p), p);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_LE(std::abs(back.values[i] - xs[i]), 1e-9 * std::max(1.0, std::abs(xs[i])));
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (xs[i] < xs[j]) {
          EXPECT_LT(p.apply(xs[i]), p.apply(xs[j]));
        }
    }
  }
}

TEST(Split, ChronologicalFloor) {
  const auto s = synthesize_profile({});
  auto [train, test] = split(s, 0.8);
  EXPECT_EQ(train.size(), 8064u);
  EXPECT_EQ(test.size(), 2016u);
  EXPECT_EQ(test.timestamps.front(), 8064);
  auto [a, b] = split(make_series(std::vector<double>(10, 1.0)), 0.5);
  EXPECT_EQ(a.size(), 5u);
  EXPECT_EQ(b.size(), 5u);
  EXPECT_THROW(split(s, 1.0), std::invalid_argument);
  EXPECT_THROW(split(s, 0.0), std::invalid_argument);
}

TEST(Windows, CountsAndStarts) {
  std::vector<double> v(10);
  std::iota(v.begin(), v.end(), 0.0);
  const auto w = make_windows(v, 4, 2);
  ASSERT_EQ(w.count(), 3u);
  EXPECT_EQ(w.starts, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(w.windows(2, 3), 7.0);
  EXPECT_EQ(window_count(8064, 40, 1), 8024u);
  EXPECT_EQ(make_windows(v, 10, 1).count(), 0u);
  EXPECT_THROW(make_windows(v, 11, 1), std::invalid_argument);
}

TEST(Windows, OverlapReassemblesCoveredPrefix) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 5 + rng.below(200);
    const std::size_t n = 1 + rng.below(m);
    const std::size_t s = 1 + rng.below(n);
    std::vector<double> v(m);
    for (auto& x : v) x = rng.normal();
    const auto w = make_windows(v, n, s);
    if (w.count() == 0) continue;
    std::vector<double> rebuilt(w.row(0).begin(), w.row(0).end());
    for (std::size_t i = 1; i < w.count(); ++i)
      rebuilt.insert(rebuilt.end(), w.row(i).begin() + static_cast<std::ptrdiff_t>(n - s), w.row(i).end());
    ASSERT_LE(rebuilt.size(), v.size());
    EXPECT_TRUE(std::equal(rebuilt.begin(), rebuilt.end(), v.begin()));
  }
}

TEST(Csv, RoundTripIndexAndIso) {
  const auto p = temp_file("iso.csv",
                           "timestamp,value\n2024-01-01T00:00:00Z,1.5\n2024-01-01T00:01:00Z,2\n"
                           "2024-01-01T00:02:00Z,-3.25\n");
  const auto s = load_csv(p);
  EXPECT_EQ(s.format, TimestampFormat::iso8601);
  EXPECT_EQ(s.sample_interval, 60);
  EXPECT_EQ(s.values, (std::vector<double>{1.5, 2, -3.25}));
  const auto out = std::filesystem::temp_directory_path() / "fdia_tests" / "iso_out.csv";
  save_csv(s, out);
  const auto again = load_csv(out);
  EXPECT_EQ(again.values, s.values);
  EXPECT_EQ(again.timestamps, s.timestamps);
}

TEST(Csv, RejectsBadRows) {
  EXPECT_THROW(load_csv(temp_file("nan.csv", "timestamp,value\n0,1\n1,nan\n")), ParseError);
  EXPECT_THROW(load_csv(temp_file("gap.csv", "timestamp,value\n0,1\n1,2\n3,3\n")), ParseError);
  EXPECT_THROW(load_csv(temp_file("dec.csv", "timestamp,value\n2,1\n1,2\n")), ParseError);
  EXPECT_THROW(load_csv(temp_file("hdr.csv", "time,value\n0,1\n")), ParseError);
  try {
    load_csv(temp_file("bad.csv", "timestamp,value\n0,1\n1,abc\n"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Csv, LabelsRoundTrip) {
  const auto s = make_series({1, 2, 3, 4});
  const std::vector<bool> labels{false, true, true, false};
  const auto p = std::filesystem::temp_directory_path() / "fdia_tests" / "labels.csv";
  save_labels_csv(s, labels, p);
  EXPECT_EQ(load_labels_csv(p), labels);
}
