#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdia/aae.hpp"
#include "fdia/attacks.hpp"
#include "fdia/baselines/comparison.hpp"
#include "fdia/scoring.hpp"
#include "fdia/timeseries.hpp"

namespace fdia {

/// Bad config text, unknown key, unparsable value or missing required key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttackSettings {
  AttackKind kind = AttackKind::combined;
  double magnitude = 0.05;
  /// Share of test points to manipulate when no explicit segments are given.
  double fraction = 0.05;
  std::size_t segment_count = 4;
  /// Explicit `start:length` segments relative to the test partition.
  std::vector<Segment> segments;
  bool per_point_draw = false;
  std::uint64_t seed = 0;
};

struct BaselineSettings {
  std::vector<baselines::BaselineKind> kinds{
      baselines::BaselineKind::ae_lstm, baselines::BaselineKind::ae_cnn,
      baselines::BaselineKind::ae_fc,   baselines::BaselineKind::kmeans,
      baselines::BaselineKind::linreg,  baselines::BaselineKind::ocsvm};
  /// 0 reuses train.epochs.
  std::size_t epochs = 0;
  std::size_t latent_dim = 20;
  std::size_t kmeans_k = 32;
  std::size_t linreg_window = 72;
  std::size_t linreg_step = 36;
  std::size_t linreg_horizon = 36;
  double ocsvm_nu = 0.05;
  baselines::KernelKind ocsvm_kernel = baselines::KernelKind::sigmoid;
  double ocsvm_gamma = 0.0;
  double ocsvm_coef0 = 0.0;
  std::uint64_t seed = 0;
};

/// Every knob of an experiment. Text form: one `section.key = value` per
/// line, `#` starts a comment.
struct ExperimentConfig {
  std::uint64_t seed = 7;
  std::string source = "synthetic";
  std::filesystem::path data_path;
  ProfileParams profile;
  double train_fraction = 0.8;
  std::size_t window_step = 1;
  AttackSettings attack;
  AAEConfig model;
  std::uint64_t model_seed = 0;
  TrainConfig train;
  DetectOptions detect;
  BaselineSettings baselines;
  std::filesystem::path out_dir = "out";

  ExperimentConfig();
  bool operator==(const ExperimentConfig&) const;
};

/// Re-derives every component seed from `seed`.
void set_global_seed(ExperimentConfig& config, std::uint64_t seed);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

/// Applies one dotted `section.key` assignment.
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

/// Throws ConfigError naming the first missing or inconsistent setting.
void validate(const ExperimentConfig& config);

AttackSpec attack_spec(const ExperimentConfig& config, std::size_t test_length);
baselines::ComparisonSettings comparison_settings(const ExperimentConfig& config);

}  // namespace fdia
