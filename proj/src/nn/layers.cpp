#include "fdia/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace fdia::nn {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::lstm: return "lstm";
    case LayerKind::dense: return "dense";
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::dropout: return "dropout";
    case LayerKind::activation: return "activation";
  }
  return "unknown";
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::leaky_relu: return "leaky_relu";
  }
  return "unknown";
}

std::string to_string(Padding padding) { return padding == Padding::same ? "same" : "valid"; }

LayerKind parse_layer_kind(const std::string& text) {
  for (auto k : {LayerKind::lstm, LayerKind::dense, LayerKind::conv1d, LayerKind::dropout,
                 LayerKind::activation})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown layer kind '" + text + "'");
}

Activation parse_activation(const std::string& text) {
  for (auto a : {Activation::identity, Activation::relu, Activation::tanh, Activation::leaky_relu})
    if (to_string(a) == text) return a;
  throw std::invalid_argument("unknown activation '" + text + "'");
}

Padding parse_padding(const std::string& text) {
  if (text == "same") return Padding::same;
  if (text == "valid") return Padding::valid;
  throw std::invalid_argument("unknown padding '" + text + "'");
}

LayerSpec LayerSpec::lstm(Index units, bool return_sequences, Index repeat_steps) {
  LayerSpec s;
  s.kind = LayerKind::lstm;
  s.units = units;
  s.return_sequences = return_sequences;
  s.repeat_steps = repeat_steps;
  return s;
}

LayerSpec LayerSpec::dense(Index units, Activation act, bool flatten) {
  LayerSpec s;
  s.kind = LayerKind::dense;
  s.units = units;
  s.activation = act;
  s.flatten = flatten;
  return s;
}

LayerSpec LayerSpec::conv1d(Index filters, Index kernel, Padding padding, Activation act,
                            double slope) {
  LayerSpec s;
  s.kind = LayerKind::conv1d;
  s.units = filters;
  s.kernel = kernel;
  s.padding = padding;
  s.activation = act;
  s.slope = slope;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::activation_layer(Activation act, double slope) {
  LayerSpec s;
  s.kind = LayerKind::activation;
  s.activation = act;
  s.slope = slope;
  return s;
}

void LayerSpec::validate() const {
  switch (kind) {
    case LayerKind::lstm:
      if (units <= 0) throw std::invalid_argument("lstm needs a positive hidden size");
      if (repeat_steps < 0) throw std::invalid_argument("lstm repeat_steps must be >= 0");
      break;
    case LayerKind::dense:
      if (units <= 0) throw std::invalid_argument("dense needs a positive output size");
      break;
    case LayerKind::conv1d:
      if (units <= 0 || kernel <= 0)
        throw std::invalid_argument("conv1d needs positive filters and kernel size");
      break;
    case LayerKind::dropout:
      if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must be in [0,1)");
      break;
    case LayerKind::activation:
      break;
  }
  if (activation == Activation::leaky_relu && !(slope >= 0.0))
    throw std::invalid_argument("leaky relu slope must be non-negative");
}

Matrix activate(Activation act, double slope, const Matrix& x) {
  switch (act) {
    case Activation::identity: return x;
    case Activation::relu: return x.cwiseMax(0.0);
    case Activation::tanh: return x.array().tanh().matrix();
    case Activation::leaky_relu:
      return x.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
  }
  return x;
}

Matrix activation_grad(Activation act, double slope, const Matrix& x, const Matrix& y,
                       const Matrix& grad_out) {
  switch (act) {
    case Activation::identity: return grad_out;
    case Activation::relu:
      return grad_out.binaryExpr(x, [](double g, double v) { return v > 0.0 ? g : 0.0; });
    case Activation::tanh:
      return (grad_out.array() * (1.0 - y.array().square())).matrix();
    case Activation::leaky_relu:
      return grad_out.binaryExpr(x, [slope](double g, double v) { return v > 0.0 ? g : slope * g; });
  }
  return grad_out;
}

namespace {

Index conv_left_pad(const LayerSpec& s) {
  return s.padding == Padding::same ? (s.kernel - 1) / 2 : 0;
}

Matrix sigmoid(const Matrix& x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

}  // namespace

Layer::Layer(LayerSpec spec, Shape input, ParamSet& params, const std::string& prefix)
    : spec_(spec), in_(input), out_(input) {
  spec_.validate();
  if (in_.steps <= 0 || in_.features <= 0) throw std::invalid_argument("layer input shape is empty");
  switch (spec_.kind) {
    case LayerKind::lstm: {
      Index steps = in_.steps;
      if (spec_.repeat_steps > 0) {
        if (in_.steps != 1) throw std::invalid_argument("repeating lstm expects a one-step input");
        steps = spec_.repeat_steps;
      }
      out_ = {spec_.return_sequences ? steps : 1, spec_.units};
      const Index h = spec_.units;
      entries_.push_back(params.add(prefix + "lstm.w_input", 4 * h, in_.features));
      entries_.push_back(params.add(prefix + "lstm.w_hidden", 4 * h, h));
      entries_.push_back(params.add(prefix + "lstm.bias", 4 * h, 1));
      break;
    }
    case LayerKind::dense: {
      const Index fan_in = spec_.flatten ? in_.steps * in_.features : in_.features;
      out_ = {spec_.flatten ? 1 : in_.steps, spec_.units};
      entries_.push_back(params.add(prefix + "dense.weight", spec_.units, fan_in));
      entries_.push_back(params.add(prefix + "dense.bias", spec_.units, 1));
      break;
    }
    case LayerKind::conv1d: {
      const Index t_out =
          spec_.padding == Padding::same ? in_.steps : in_.steps - spec_.kernel + 1;
      if (t_out < 1) throw std::invalid_argument("conv1d kernel longer than its input sequence");
      out_ = {t_out, spec_.units};
      entries_.push_back(params.add(prefix + "conv1d.weight", spec_.units, spec_.kernel * in_.features));
      entries_.push_back(params.add(prefix + "conv1d.bias", spec_.units, 1));
      break;
    }
    case LayerKind::dropout:
    case LayerKind::activation:
      break;
  }
}

void Layer::initialize(ParamSet& params, Rng& rng) const {
  auto fill = [&](std::size_t entry, Index fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    auto m = params.matrix(entry);
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-bound, bound);
  };
  switch (spec_.kind) {
    case LayerKind::lstm: {
      const Index h = spec_.units;
      fill(entries_[0], in_.features);
      fill(entries_[1], h);
      auto b = params.matrix(entries_[2]);
      b.setZero();
      b.block(h, 0, h, 1).setOnes();
      break;
    }
    case LayerKind::dense:
    case LayerKind::conv1d: {
      const auto w = params.matrix(entries_[0]);
      fill(entries_[0], w.cols());
      params.matrix(entries_[1]).setZero();
      break;
    }
    default:
      break;
  }
}

Tensor Layer::forward(const ParamSet& params, const Tensor& in, bool training, Rng* rng,
                      LayerCache& cache) const {
  if (in.features() != in_.features || in.steps != in_.steps)
    throw std::invalid_argument(to_string(spec_.kind) + " layer expects " +
                                std::to_string(in_.steps) + " steps x " +
                                std::to_string(in_.features) + " features, got " +
                                std::to_string(in.steps) + " x " + std::to_string(in.features()));
  cache.input = in;
  cache.aux.clear();
  switch (spec_.kind) {
    case LayerKind::lstm:
      cache.output = forward_lstm(params, in, cache);
      break;
    case LayerKind::dense:
      cache.output = forward_dense(params, in, cache);
      break;
    case LayerKind::conv1d:
      cache.output = forward_conv(params, in, cache);
      break;
    case LayerKind::dropout: {
      if (!training || spec_.rate == 0.0) {
        cache.output = in;
        break;
      }
      if (rng == nullptr) throw std::invalid_argument("training-mode dropout needs a random source");
      const double keep = 1.0 - spec_.rate;
      Matrix mask(in.data.rows(), in.data.cols());
      for (Index j = 0; j < mask.cols(); ++j)
        for (Index i = 0; i < mask.rows(); ++i) mask(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
      cache.output = Tensor(in.data.cwiseProduct(mask), in.steps, in.batch);
      cache.aux.push_back(std::move(mask));
      break;
    }
    case LayerKind::activation:
      cache.output = Tensor(activate(spec_.activation, spec_.slope, in.data), in.steps, in.batch);
      break;
  }
  return cache.output;
}

Tensor Layer::backward(const ParamSet& params, const LayerCache& cache, const Tensor& grad_out,
                       ParamSet* grads) const {
  switch (spec_.kind) {
    case LayerKind::lstm: return backward_lstm(params, cache, grad_out, grads);
    case LayerKind::dense: return backward_dense(params, cache, grad_out, grads);
    case LayerKind::conv1d: return backward_conv(params, cache, grad_out, grads);
    case LayerKind::dropout:
      if (cache.aux.empty()) return grad_out;
      return Tensor(grad_out.data.cwiseProduct(cache.aux[0]), grad_out.steps, grad_out.batch);
    case LayerKind::activation:
      return Tensor(activation_grad(spec_.activation, spec_.slope, cache.input.data,
                                    cache.output.data, grad_out.data),
                    grad_out.steps, grad_out.batch);
  }
  return grad_out;
}

// Gate rows are ordered input, forget, candidate, output. The cache holds the
// post-activation gates, cell states, tanh(cell) and hidden states, each laid
// out like a Tensor over the unrolled steps.
Tensor Layer::forward_lstm(const ParamSet& params, const Tensor& in, LayerCache& cache) const {
  const Index h = spec_.units;
  const Index b = in.batch;
  const bool repeat = spec_.repeat_steps > 0;
  const Index steps = repeat ? spec_.repeat_steps : in.steps;
  const auto wx = params.matrix(entries_[0]);
  const auto wh = params.matrix(entries_[1]);
  const auto bias = params.matrix(entries_[2]);

  Matrix xw = wx * in.data;
  xw.colwise() += bias.col(0);

  Matrix gates(4 * h, steps * b);
  Matrix cells(h, steps * b);
  Matrix tcells(h, steps * b);
  Matrix hidden(h, steps * b);
  Matrix z(4 * h, b);
  for (Index t = 0; t < steps; ++t) {
    z = repeat ? xw : Matrix(xw.middleCols(t * b, b));
    if (t > 0) z.noalias() += wh * hidden.middleCols((t - 1) * b, b);
    auto g = gates.middleCols(t * b, b);
    g.topRows(2 * h) = sigmoid(z.topRows(2 * h));
    g.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
    g.bottomRows(h) = sigmoid(z.bottomRows(h));
    auto c = cells.middleCols(t * b, b);
    c = g.topRows(h).cwiseProduct(g.middleRows(2 * h, h));
    if (t > 0) c += g.middleRows(h, h).cwiseProduct(cells.middleCols((t - 1) * b, b));
    tcells.middleCols(t * b, b) = c.array().tanh().matrix();
    hidden.middleCols(t * b, b) = g.bottomRows(h).cwiseProduct(tcells.middleCols(t * b, b));
  }
  Tensor out = spec_.return_sequences ? Tensor(hidden, steps, b)
                                      : Tensor(Matrix(hidden.middleCols((steps - 1) * b, b)), 1, b);
  cache.aux = {std::move(gates), std::move(cells), std::move(tcells), std::move(hidden)};
  return out;
}

Tensor Layer::backward_lstm(const ParamSet& params, const LayerCache& cache,
                            const Tensor& grad_out, ParamSet* grads) const {
  const Index h = spec_.units;
  const Tensor& in = cache.input;
  const Index b = in.batch;
  const bool repeat = spec_.repeat_steps > 0;
  const Index steps = repeat ? spec_.repeat_steps : in.steps;
  const auto wx = params.matrix(entries_[0]);
  const auto wh = params.matrix(entries_[1]);
  const Matrix& gates = cache.aux[0];
  const Matrix& cells = cache.aux[1];
  const Matrix& tcells = cache.aux[2];
  const Matrix& hidden = cache.aux[3];

  Matrix dz_all(4 * h, steps * b);
  Matrix dh_next = Matrix::Zero(h, b);
  Matrix dc_next = Matrix::Zero(h, b);
  Matrix dh(h, b), dc(h, b);
  for (Index t = steps - 1; t >= 0; --t) {
    dh = dh_next;
    if (spec_.return_sequences) {
      dh += grad_out.step(t);
    } else if (t == steps - 1) {
      dh += grad_out.step(0);
    }
    const auto g = gates.middleCols(t * b, b);
    const auto i_g = g.topRows(h).array();
    const auto f_g = g.middleRows(h, h).array();
    const auto c_g = g.middleRows(2 * h, h).array();
    const auto o_g = g.bottomRows(h).array();
    const auto tc = tcells.middleCols(t * b, b).array();

    dc = (dh.array() * o_g * (1.0 - tc.square())).matrix() + dc_next;
    auto dz = dz_all.middleCols(t * b, b);
    dz.topRows(h) = (dc.array() * c_g * i_g * (1.0 - i_g)).matrix();
    if (t > 0) {
      dz.middleRows(h, h) =
          (dc.array() * cells.middleCols((t - 1) * b, b).array() * f_g * (1.0 - f_g)).matrix();
    } else {
      dz.middleRows(h, h).setZero();
    }
    dz.middleRows(2 * h, h) = (dc.array() * i_g * (1.0 - c_g.square())).matrix();
    dz.bottomRows(h) = (dh.array() * tc * o_g * (1.0 - o_g)).matrix();
    dc_next = (dc.array() * f_g).matrix();
    dh_next.noalias() = wh.transpose() * dz;
  }

  Matrix dz_in = repeat ? Matrix(Matrix::Zero(4 * h, b)) : Matrix();
  if (repeat)
    for (Index t = 0; t < steps; ++t) dz_in += dz_all.middleCols(t * b, b);
  const Matrix& dz_x = repeat ? dz_in : dz_all;

  if (grads != nullptr) {
    grads->matrix(entries_[0]).noalias() += dz_x * in.data.transpose();
    if (steps > 1)
      grads->matrix(entries_[1]).noalias() +=
          dz_all.rightCols((steps - 1) * b) * hidden.leftCols((steps - 1) * b).transpose();
    grads->matrix(entries_[2]).col(0) += dz_x.rowwise().sum();
  }
  return Tensor(wx.transpose() * dz_x, in.steps, b);
}

Tensor Layer::forward_dense(const ParamSet& params, const Tensor& in, LayerCache& cache) const {
  const auto w = params.matrix(entries_[0]);
  const auto bias = params.matrix(entries_[1]);
  Matrix pre;
  Index steps = in.steps;
  if (spec_.flatten && in.steps > 1) {
    const Index f = in.features();
    Matrix flat(in.steps * f, in.batch);
    for (Index t = 0; t < in.steps; ++t) flat.middleRows(t * f, f) = in.step(t);
    pre = w * flat;
    steps = 1;
  } else {
    pre = w * in.data;
    if (spec_.flatten) steps = 1;
  }
  pre.colwise() += bias.col(0);
  Matrix out = activate(spec_.activation, spec_.slope, pre);
  cache.aux.push_back(std::move(pre));
  return Tensor(std::move(out), steps, in.batch);
}

Tensor Layer::backward_dense(const ParamSet& params, const LayerCache& cache,
                             const Tensor& grad_out, ParamSet* grads) const {
  const auto w = params.matrix(entries_[0]);
  const Tensor& in = cache.input;
  const Matrix dpre =
      activation_grad(spec_.activation, spec_.slope, cache.aux[0], cache.output.data, grad_out.data);
  if (spec_.flatten && in.steps > 1) {
    const Index f = in.features();
    Matrix flat(in.steps * f, in.batch);
    for (Index t = 0; t < in.steps; ++t) flat.middleRows(t * f, f) = in.step(t);
    if (grads != nullptr) {
      grads->matrix(entries_[0]).noalias() += dpre * flat.transpose();
      grads->matrix(entries_[1]).col(0) += dpre.rowwise().sum();
    }
    const Matrix dflat = w.transpose() * dpre;
    Tensor dx(f, in.steps, in.batch);
    for (Index t = 0; t < in.steps; ++t) dx.step(t) = dflat.middleRows(t * f, f);
    return dx;
  }
  if (grads != nullptr) {
    grads->matrix(entries_[0]).noalias() += dpre * in.data.transpose();
    grads->matrix(entries_[1]).col(0) += dpre.rowwise().sum();
  }
  return Tensor(w.transpose() * dpre, in.steps, in.batch);
}

// Cross-correlation via an unfolded (kernel * channels) x (steps * batch)
// matrix; zero rows stand in for padding.
Tensor Layer::forward_conv(const ParamSet& params, const Tensor& in, LayerCache& cache) const {
  const auto w = params.matrix(entries_[0]);
  const auto bias = params.matrix(entries_[1]);
  const Index c = in.features();
  const Index k = spec_.kernel;
  const Index b = in.batch;
  const Index t_out = out_.steps;
  const Index pad = conv_left_pad(spec_);
  Matrix cols = Matrix::Zero(k * c, t_out * b);
  for (Index t = 0; t < t_out; ++t)
    for (Index j = 0; j < k; ++j) {
      const Index src = t + j - pad;
      if (src >= 0 && src < in.steps) cols.block(j * c, t * b, c, b) = in.step(src);
    }
  Matrix pre = w * cols;
  pre.colwise() += bias.col(0);
  Matrix out = activate(spec_.activation, spec_.slope, pre);
  cache.aux.push_back(std::move(pre));
  cache.aux.push_back(std::move(cols));
  return Tensor(std::move(out), t_out, b);
}

Tensor Layer::backward_conv(const ParamSet& params, const LayerCache& cache,
                            const Tensor& grad_out, ParamSet* grads) const {
  const auto w = params.matrix(entries_[0]);
  const Tensor& in = cache.input;
  const Index c = in.features();
  const Index k = spec_.kernel;
  const Index b = in.batch;
  const Index t_out = out_.steps;
  const Index pad = conv_left_pad(spec_);
  const Matrix dpre =
      activation_grad(spec_.activation, spec_.slope, cache.aux[0], cache.output.data, grad_out.data);
  if (grads != nullptr) {
    grads->matrix(entries_[0]).noalias() += dpre * cache.aux[1].transpose();
    grads->matrix(entries_[1]).col(0) += dpre.rowwise().sum();
  }
  const Matrix dcols = w.transpose() * dpre;
  Tensor dx(c, in.steps, b);
  for (Index t = 0; t < t_out; ++t)
    for (Index j = 0; j < k; ++j) {
      const Index src = t + j - pad;
      if (src >= 0 && src < in.steps) dx.step(src) += dcols.block(j * c, t * b, c, b);
    }
  return dx;
}

}  // namespace fdia::nn
