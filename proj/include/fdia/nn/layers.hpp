#pragma once

#include <string>
#include <vector>

#include "fdia/nn/param_set.hpp"
#include "fdia/nn/tensor.hpp"
#include "fdia/rng.hpp"

namespace fdia::nn {

enum class LayerKind { lstm, dense, conv1d, dropout, activation };
enum class Activation { identity, relu, tanh, leaky_relu };
enum class Padding { valid, same };

std::string to_string(LayerKind kind);
std::string to_string(Activation act);
std::string to_string(Padding padding);
LayerKind parse_layer_kind(const std::string& text);
Activation parse_activation(const std::string& text);
Padding parse_padding(const std::string& text);

/// Declarative description of one layer.
///
/// `units` is the LSTM hidden width, dense output width or conv filter count.
/// Dense and conv1d layers carry a fused activation.
struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  Index units = 0;
  Index kernel = 0;
  Padding padding = Padding::valid;
  double rate = 0.0;
  Activation activation = Activation::identity;
  double slope = 0.2;
  /// LSTM: emit every step, or only the final hidden state.
  bool return_sequences = true;
  /// LSTM: feed a one-step input at each of this many steps (0 = off).
  Index repeat_steps = 0;
  /// Dense: consume the whole sequence as one concatenated vector.
  bool flatten = false;

  static LayerSpec lstm(Index units, bool return_sequences = true, Index repeat_steps = 0);
  static LayerSpec dense(Index units, Activation act = Activation::identity, bool flatten = false);
  static LayerSpec conv1d(Index filters, Index kernel, Padding padding = Padding::valid,
                          Activation act = Activation::identity, double slope = 0.2);
  static LayerSpec dropout(double rate);
  static LayerSpec activation_layer(Activation act, double slope = 0.2);

  void validate() const;
  bool operator==(const LayerSpec&) const = default;
};

/// Everything a layer's backward pass needs from its forward pass.
struct LayerCache {
  Tensor input;
  Tensor output;
  std::vector<Matrix> aux;
};

/// A layer spec bound to an input shape and its slots in a ParamSet.
class Layer {
 public:
  Layer(LayerSpec spec, Shape input, ParamSet& params, const std::string& prefix);

  const LayerSpec& spec() const { return spec_; }
  Shape input_shape() const { return in_; }
  Shape output_shape() const { return out_; }

  /// Seeded uniform(+-1/sqrt(fan_in)) weights; LSTM forget-gate bias 1.
  void initialize(ParamSet& params, Rng& rng) const;

  /// `rng` is only consulted by dropout in training mode.
  Tensor forward(const ParamSet& params, const Tensor& in, bool training, Rng* rng,
                 LayerCache& cache) const;
  /// Accumulates parameter gradients into `grads` (may be null) and returns
  /// the gradient with respect to the layer input.
  Tensor backward(const ParamSet& params, const LayerCache& cache, const Tensor& grad_out,
                  ParamSet* grads) const;

 private:
  Tensor forward_lstm(const ParamSet& params, const Tensor& in, LayerCache& cache) const;
  Tensor backward_lstm(const ParamSet& params, const LayerCache& cache, const Tensor& grad_out,
                       ParamSet* grads) const;
  Tensor forward_dense(const ParamSet& params, const Tensor& in, LayerCache& cache) const;
  Tensor backward_dense(const ParamSet& params, const LayerCache& cache, const Tensor& grad_out,
                        ParamSet* grads) const;
  Tensor forward_conv(const ParamSet& params, const Tensor& in, LayerCache& cache) const;
  Tensor backward_conv(const ParamSet& params, const LayerCache& cache, const Tensor& grad_out,
                       ParamSet* grads) const;

  LayerSpec spec_;
  Shape in_;
  Shape out_;
  std::vector<std::size_t> entries_;
};

/// Elementwise activation and its derivative expressed through input and output.
Matrix activate(Activation act, double slope, const Matrix& x);
Matrix activation_grad(Activation act, double slope, const Matrix& x, const Matrix& y,
                       const Matrix& grad_out);

}  // namespace fdia::nn
