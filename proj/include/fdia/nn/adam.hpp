#pragma once

#include <cstdint>

#include "fdia/nn/param_set.hpp"

namespace fdia::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  /// Multiplier applied to the rate once per completed epoch.
  double decay = 0.99;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Adam with bias correction and per-epoch exponential rate decay.
class Adam {
 public:
  Adam() = default;
  Adam(AdamConfig config, Index param_count);

  /// One update: params -= rate * m_hat / (sqrt(v_hat) + eps).
  void step(ParamSet& params, const ParamSet& grads);
  void end_epoch() { ++epoch_; }

  /// learning_rate * decay^epoch.
  double effective_rate() const;
  std::int64_t steps() const { return steps_; }
  std::int64_t epoch() const { return epoch_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  Vector m_;
  Vector v_;
  std::int64_t steps_ = 0;
  std::int64_t epoch_ = 0;
};

}  // namespace fdia::nn
