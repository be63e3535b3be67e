#include <gtest/gtest.h>

#include "fdia/config.hpp"

using namespace fdia;

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig c;
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, OverridesRoundTrip) {
  ExperimentConfig c;
  apply_override(c, "model.encoder_units", "8,8");
  apply_override(c, "train.learning_rate", "0.0025");
  apply_override(c, "detect.aggregation", "center");
  apply_override(c, "attack.segments", "10:5,40:3");
  apply_override(c, "baselines.kinds", "kmeans,ocsvm");
  apply_override(c, "data.noise_std", "0.1");
  const ExperimentConfig back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.model.encoder_units, (std::vector<nn::Index>{8, 8}));
  EXPECT_EQ(back.train.learning_rate, 0.0025);
  EXPECT_EQ(back.detect.aggregation, Aggregation::center);
  ASSERT_EQ(back.attack.segments.size(), 2u);
  EXPECT_EQ(back.attack.segments[1].start, 40u);
  EXPECT_EQ(back.baselines.kinds.size(), 2u);
}

TEST(Config, RunSeedDerivesComponentSeeds) {
  const ExperimentConfig c = parse_config("run.seed = 100\n");
  EXPECT_EQ(c.seed, 100u);
  ExperimentConfig d;
  set_global_seed(d, 100);
  EXPECT_EQ(c, d);
  // An explicit component seed wins over the derived one regardless of order.
  const ExperimentConfig e = parse_config("train.seed = 3\nrun.seed = 100\n");
  EXPECT_EQ(e.train.seed, 3u);
}

TEST(Config, CommentsAndBlankLines) {
  const ExperimentConfig c = parse_config("# header\n\nwindow.size = 12  # trailing\n");
  EXPECT_EQ(c.model.window_size, 12u);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("nonsense"), ConfigError);
  EXPECT_THROW(parse_config("model.unknown = 1"), ConfigError);
  EXPECT_THROW(parse_config("train.epochs = many"), ConfigError);
  ExperimentConfig c;
  c.source = "csv";
  try {
    validate(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("data.path"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/cfg.txt"), ConfigError);
}

TEST(Config, EveryKeyIsSerialized) {
  const std::string text = serialize_config(ExperimentConfig{});
  for (const auto& key : config_keys()) EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
}

TEST(Config, AttackSpecCoversFraction) {
  ExperimentConfig c;
  const AttackSpec spec = attack_spec(c, 2016);
  std::size_t covered = 0;
  const auto segments = resolve_segments(spec, 2016);
  for (const auto& s : segments) covered += s.length;
  EXPECT_GE(segments.size(), 4u);
  EXPECT_NEAR(static_cast<double>(covered), 0.05 * 2016, 4.0);
}
