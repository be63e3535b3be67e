#include <gtest/gtest.h>

#include "fdia/attacks.hpp"
#include "fdia/rng.hpp"

using namespace fdia;

namespace {

AttackSpec spec_of(AttackKind kind, double magnitude, std::vector<Segment> segs) {
  AttackSpec s;
  s.kind = kind;
  s.magnitude = magnitude;
  s.segments = std::move(segs);
  return s;
}

AttackSpec random_spec(Rng& rng, std::size_t length) {
  AttackSpec s;
  s.kind = static_cast<AttackKind>(rng.below(3));
  s.magnitude = rng.uniform(1e-6, 0.05);
  s.per_point_draw = rng.below(2) == 1;
  s.draw_seed = rng.below(1000);
  const std::size_t count = 1 + rng.below(4);
  const std::size_t seg_len = 1 + rng.below(length / (2 * count));
  s.placement = RandomPlacement{count, seg_len, rng.below(1u << 20)};
  return s;
}

}  // namespace

TEST(Attacks, DeductiveScalesDown) {
  const auto out = inject_deductive(make_series({1.0, 2.0}), spec_of(AttackKind::deductive, 0.05, {{0, 2}}));
  EXPECT_DOUBLE_EQ(out.series.values[0], 0.95);
  EXPECT_DOUBLE_EQ(out.series.values[1], 1.90);
  EXPECT_EQ(out.labels, (std::vector<bool>{true, true}));
}

TEST(Attacks, VanishingMagnitudeKeepsLabels) {
  const auto out = inject_deductive(make_series({3.0}), spec_of(AttackKind::deductive, 1e-12, {{0, 1}}));
  EXPECT_NEAR(out.series.values[0], 3.0, 1e-11);
  EXPECT_TRUE(out.labels[0]);
}

TEST(Attacks, NoSegmentsIsIdentity) {
  const auto src = make_series({1, 2, 3});
  for (auto kind : {AttackKind::deductive, AttackKind::additive, AttackKind::combined}) {
    const auto out = inject(src, spec_of(kind, 0.05, {}));
    EXPECT_EQ(out.series.values, src.values);
    EXPECT_EQ(out.labels, (std::vector<bool>(3, false)));
  }
}

TEST(Attacks, AdditiveScalesUpAndFixesZero) {
  const auto out = inject_additive(make_series({1.0, 0.0}), spec_of(AttackKind::additive, 0.03, {{0, 2}}));
  EXPECT_DOUBLE_EQ(out.series.values[0], 1.03);
  EXPECT_EQ(out.series.values[1], 0.0);
}

TEST(Attacks, CombinedSplitsHalfAndHalf) {
  const auto src = make_series({1, 1, 1, 1, 1, 1, 1});
  const auto out = inject_combined(src, spec_of(AttackKind::combined, 0.05, {{0, 2}, {4, 2}}));
  EXPECT_DOUBLE_EQ(out.series.values[0], 1.05);
  EXPECT_DOUBLE_EQ(out.series.values[1], 1.05);
  EXPECT_DOUBLE_EQ(out.series.values[4], 0.95);
  EXPECT_DOUBLE_EQ(out.series.values[5], 0.95);
  const auto one = inject_combined(src, spec_of(AttackKind::combined, 0.05, {{3, 1}}));
  EXPECT_DOUBLE_EQ(one.series.values[3], 1.05);
  const auto odd = inject_combined(src, spec_of(AttackKind::combined, 0.05, {{0, 3}}));
  EXPECT_DOUBLE_EQ(odd.series.values[1], 1.05);
  EXPECT_DOUBLE_EQ(odd.series.values[2], 0.95);
}

TEST(Attacks, RejectsBadSegments) {
  const auto src = make_series({1, 2, 3, 4});
  EXPECT_THROW(inject(src, spec_of(AttackKind::additive, 0.05, {{0, 2}, {1, 2}})), std::invalid_argument);
  EXPECT_THROW(inject(src, spec_of(AttackKind::additive, 0.05, {{3, 2}})), std::invalid_argument);
  EXPECT_THROW(inject(src, spec_of(AttackKind::additive, 0.0, {{0, 1}})), std::invalid_argument);
  EXPECT_THROW(inject_additive(src, spec_of(AttackKind::deductive, 0.05, {{0, 1}})), std::invalid_argument);
}

TEST(Attacks, StealthDetectsViolations) {
  const auto src = make_series({1, 2, 3, 4});
  auto out = inject(src, spec_of(AttackKind::deductive, 0.05, {{1, 2}}));
  EXPECT_TRUE(verify_stealth(src, out));
  auto tampered = out;
  tampered.series.values[0] += 1e-15;
  EXPECT_FALSE(verify_stealth(src, tampered));
  auto too_far = out;
  too_far.series.values[1] = 2.0 * 0.9;
  EXPECT_FALSE(verify_stealth(src, too_far));
  auto shorter = out;
  shorter.series = make_series({1, 2, 3});
  EXPECT_THROW(verify_stealth(src, shorter), std::invalid_argument);
}

TEST(Attacks, RandomSpecsPreserveShapeStealthAndCounts) {
  Rng rng(11);
  ProfileParams p;
  p.length = 600;
  const auto src = synthesize_profile(p);
  for (int trial = 0; trial < 300; ++trial) {
    const auto spec = random_spec(rng, src.size());
    const auto out = inject(src, spec);
    ASSERT_EQ(out.series.size(), src.size());
    EXPECT_EQ(out.series.timestamps, src.timestamps);
    EXPECT_TRUE(verify_stealth(src, out));
    std::size_t labelled = 0, expected = 0;
    for (bool b : out.labels) labelled += b;
    for (const auto& s : out.segments) expected += s.length;
    EXPECT_EQ(labelled, expected);
    EXPECT_EQ(inject(src, spec).series.values, out.series.values);
  }
}

TEST(Attacks, PlacementSegmentsAreDisjointAndInRange) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto segs = place_segments(2016, 4, 25, seed);
    ASSERT_EQ(segs.size(), 4u);
    for (std::size_t k = 0; k < segs.size(); ++k) {
      EXPECT_LE(segs[k].start + segs[k].length, 2016u);
      if (k > 0) {
        EXPECT_LT(segs[k - 1].start + segs[k - 1].length, segs[k].start);
      }
    }
  }
  const auto pl = placement_for_fraction(2016, 0.05, 4, 1);
  EXPECT_EQ(pl.segment_length, 25u);
}
