#pragma once

#include <vector>

#include "fdia/nn/layers.hpp"

namespace fdia::nn {

struct ForwardCache {
  std::vector<LayerCache> layers;
};

/// Feed-forward stack of layers with its own parameters.
class Network {
 public:
  Network() = default;
  Network(Shape input, std::vector<LayerSpec> specs);

  Shape input_shape() const { return input_; }
  Shape output_shape() const { return layers_.empty() ? input_ : layers_.back().output_shape(); }
  const std::vector<LayerSpec>& specs() const { return specs_; }

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  void initialize(Rng& rng);

  /// Evaluates the stack. Inference mode (training = false) is a pure function
  /// of the input; training mode draws dropout masks from `rng`. Pass a cache
  /// to enable backward().
  Tensor forward(const Tensor& in, bool training = false, Rng* rng = nullptr,
                 ForwardCache* cache = nullptr) const;

  /// Back-propagates `grad_out` through the cached pass. Parameter gradients
  /// are added into `grads` (same layout as params(); may be null).
  Tensor backward(const ForwardCache& cache, const Tensor& grad_out, ParamSet* grads) const;

 private:
  Shape input_;
  std::vector<LayerSpec> specs_;
  std::vector<Layer> layers_;
  ParamSet params_;
};

}  // namespace fdia::nn
