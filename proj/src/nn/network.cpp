#include "fdia/nn/network.hpp"

#include <stdexcept>

namespace fdia::nn {

Network::Network(Shape input, std::vector<LayerSpec> specs) : input_(input), specs_(std::move(specs)) {
  Shape shape = input_;
  layers_.reserve(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    layers_.emplace_back(specs_[i], shape, params_, "l" + std::to_string(i) + ".");
    shape = layers_.back().output_shape();
  }
}

void Network::initialize(Rng& rng) {
  for (const auto& layer : layers_) layer.initialize(params_, rng);
}

Tensor Network::forward(const Tensor& in, bool training, Rng* rng, ForwardCache* cache) const {
  if (cache != nullptr) cache->layers.resize(layers_.size());
  LayerCache scratch;
  Tensor x = in;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    LayerCache& lc = cache != nullptr ? cache->layers[i] : scratch;
    x = layers_[i].forward(params_, x, training, rng, lc);
  }
  return x;
}

Tensor Network::backward(const ForwardCache& cache, const Tensor& grad_out, ParamSet* grads) const {
  if (cache.layers.size() != layers_.size())
    throw std::invalid_argument("forward cache does not belong to this network");
  if (grads != nullptr && grads->size() != params_.size())
    throw std::invalid_argument("gradient buffer layout does not match parameters");
  Tensor g = grad_out;
  for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i].backward(params_, cache.layers[i], g, grads);
  return g;
}

}  // namespace fdia::nn
