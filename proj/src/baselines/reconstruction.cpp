#include "fdia/baselines/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fdia::baselines {

using nn::Index;
using nn::LayerSpec;
using nn::Matrix;
using nn::Tensor;

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::ae_lstm: return "ae_lstm";
    case BaselineKind::ae_cnn: return "ae_cnn";
    case BaselineKind::ae_fc: return "ae_fc";
    case BaselineKind::kmeans: return "kmeans";
    case BaselineKind::linreg: return "linreg";
    case BaselineKind::ocsvm: return "ocsvm";
  }
  return "?";
}

BaselineKind parse_baseline_kind(const std::string& text) {
  for (auto k : {BaselineKind::ae_lstm, BaselineKind::ae_cnn, BaselineKind::ae_fc,
                 BaselineKind::kmeans, BaselineKind::linreg, BaselineKind::ocsvm})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown baseline '" + text + "'");
}

namespace {

Tensor to_tensor(const Matrix& rows, Layout layout) {
  return layout == Layout::sequence ? sequence_from_rows(rows) : vector_from_rows(rows);
}

Matrix from_tensor(const Tensor& t, Layout layout) {
  return layout == Layout::sequence ? rows_from_sequence(t) : rows_from_vector(t);
}

nn::Shape shape_of(Layout layout, std::size_t length) {
  const auto n = static_cast<Index>(length);
  return layout == Layout::sequence ? nn::Shape{n, 1} : nn::Shape{1, n};
}

Autoencoder finish(Autoencoder ae, std::vector<LayerSpec> enc, std::vector<LayerSpec> dec,
                   std::uint64_t seed) {
  ae.encoder = nn::Network(shape_of(ae.input, ae.window_size), std::move(enc));
  ae.decoder = nn::Network(shape_of(ae.decoder_input, ae.latent_dim), std::move(dec));
  if (ae.encoder.output_shape() != nn::Shape{1, static_cast<Index>(ae.latent_dim)})
    throw std::logic_error(ae.name + ": encoder does not emit a single-step code");
  Rng rng(seed);
  ae.encoder.initialize(rng);
  ae.decoder.initialize(rng);
  return ae;
}

void check_sizes(std::size_t window_size, std::size_t latent_dim) {
  if (window_size < 1 || latent_dim < 1)
    throw std::invalid_argument("window size and latent dimension must be >= 1");
}

}  // namespace

Autoencoder build_ae_cnn(std::size_t window_size, std::size_t latent_dim, std::uint64_t seed) {
  check_sizes(window_size, latent_dim);
  const auto n = static_cast<Index>(window_size);
  const auto d = static_cast<Index>(latent_dim);
  const auto relu = nn::Activation::relu;
  Autoencoder ae{"AE-CNN", window_size, latent_dim, Layout::sequence, Layout::sequence,
                 Layout::vector, {}, {}};
  return finish(std::move(ae),
                {LayerSpec::conv1d(64, std::min<Index>(5, n), nn::Padding::same, relu),
                 LayerSpec::conv1d(32, std::min<Index>(3, n), nn::Padding::same, relu),
                 LayerSpec::dense(d, nn::Activation::identity, true)},
                {LayerSpec::conv1d(32, std::min<Index>(3, d), nn::Padding::same, relu),
                 LayerSpec::conv1d(64, std::min<Index>(5, d), nn::Padding::same, relu),
                 LayerSpec::dense(n, nn::Activation::tanh, true)},
                seed);
}

Autoencoder build_ae_fc(std::size_t window_size, std::size_t latent_dim, std::uint64_t seed) {
  check_sizes(window_size, latent_dim);
  const auto n = static_cast<Index>(window_size);
  const auto d = static_cast<Index>(latent_dim);
  const auto relu = nn::Activation::relu;
  Autoencoder ae{"AE-FC", window_size, latent_dim, Layout::vector, Layout::vector,
                 Layout::vector, {}, {}};
  return finish(std::move(ae),
                {LayerSpec::dense(100, relu), LayerSpec::dense(100, relu), LayerSpec::dense(d)},
                {LayerSpec::dense(100, relu), LayerSpec::dense(100, relu),
                 LayerSpec::dense(n, nn::Activation::tanh)},
                seed);
}

namespace {

Tensor code_for_decoder(const Autoencoder& ae, const Tensor& code) {
  return ae.decoder_input == Layout::sequence ? vector_to_sequence(code) : code;
}

Tensor code_grad_from_decoder(const Autoencoder& ae, const Tensor& grad) {
  return ae.decoder_input == Layout::sequence ? sequence_to_vector(grad) : grad;
}

}  // namespace

Matrix reconstruct(const Autoencoder& ae, const Matrix& windows) {
  if (windows.cols() != static_cast<Index>(ae.window_size))
    throw std::invalid_argument(ae.name + ": window length mismatch");
  const Tensor code = ae.encoder.forward(to_tensor(windows, ae.input));
  return from_tensor(ae.decoder.forward(code_for_decoder(ae, code)), ae.output);
}

Autoencoder train_autoencoder(Autoencoder ae, const WindowSet& windows, const TrainConfig& config) {
  config.validate();
  if (config.epochs == 0) return ae;
  if (windows.count() == 0) throw std::invalid_argument("training needs at least one window");
  if (windows.window_size != ae.window_size)
    throw std::invalid_argument(ae.name + ": window size does not match");
  Rng rng(config.seed);
  const nn::AdamConfig adam{config.learning_rate, config.lr_decay};
  nn::Adam opt_e(adam, ae.encoder.params().size());
  nn::Adam opt_d(adam, ae.decoder.params().size());
  const std::size_t n = windows.count();
  const std::size_t b = config.batch_size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto step = [&](const std::vector<std::size_t>& idx, std::size_t epoch) {
    const Matrix xb = gather_rows(windows.windows, idx);
    nn::ForwardCache ce, cd;
    const Tensor code = ae.encoder.forward(to_tensor(xb, ae.input), true, &rng, &ce);
    const Tensor out = ae.decoder.forward(code_for_decoder(ae, code), true, &rng, &cd);
    const Matrix diff = from_tensor(out, ae.output) - xb;
    const double count = static_cast<double>(diff.size());
    double loss = diff.squaredNorm() / count;
    const Tensor grad_out = to_tensor(2.0 * diff / count, ae.output);
    nn::ParamSet ge = ae.encoder.params().zeros_like();
    nn::ParamSet gd = ae.decoder.params().zeros_like();
    const Tensor gcode = code_grad_from_decoder(ae, ae.decoder.backward(cd, grad_out, &gd));
    ae.encoder.backward(ce, gcode, &ge);
    for (auto [net, g] : {std::pair{&ae.encoder, &ge}, std::pair{&ae.decoder, &gd}}) {
      const auto& p = net->params().flat();
      if (config.regularizer == Regularizer::ridge) {
        loss += config.reg_weight * p.squaredNorm();
        g->flat() += 2.0 * config.reg_weight * p;
      } else {
        loss += config.reg_weight * p.lpNorm<1>();
        g->flat() += config.reg_weight *
                     p.unaryExpr([](double v) { return static_cast<double>((v > 0) - (v < 0)); });
      }
    }
    if (!std::isfinite(loss))
      throw TrainingError(ae.name + ": non-finite reconstruction loss at epoch " +
                          std::to_string(epoch + 1));
    opt_e.step(ae.encoder.params(), ge);
    opt_d.step(ae.decoder.params(), gd);
  };

  for (std::size_t e = 0; e < config.epochs; ++e) {
    if (config.batches_per_epoch == 0) {
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      for (std::size_t s = 0; s < n; s += b)
        step({order.begin() + static_cast<std::ptrdiff_t>(s),
              order.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + b))},
             e);
    } else {
      for (std::size_t k = 0; k < config.batches_per_epoch; ++k) {
        std::vector<std::size_t> idx(b);
        if (b > n) {
          for (auto& i : idx) i = rng.below(n);
        } else {
          for (std::size_t i = 0; i < b; ++i) std::swap(order[i], order[i + rng.below(n - i)]);
          std::copy(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b), idx.begin());
        }
        step(idx, e);
      }
    }
    opt_e.end_epoch();
    opt_d.end_epoch();
  }
  return ae;
}

AAEModel train_ae_lstm(const AAEConfig& config, const WindowSet& windows,
                       const TrainConfig& train_config, std::uint64_t init_seed) {
  TrainConfig tc = train_config;
  tc.adversarial = false;
  return train(build_model(config, init_seed), windows, tc).first;
}

}  // namespace fdia::baselines
