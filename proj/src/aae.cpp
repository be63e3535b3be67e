#include "fdia/aae.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

namespace fdia {

using nn::Index;
using nn::LayerSpec;
using nn::Matrix;
using nn::Tensor;

std::string to_string(ReconstructionTerm term) {
  return term == ReconstructionTerm::l2_norm_sum ? "l2_norm_sum" : "mean_squared";
}

ReconstructionTerm parse_reconstruction_term(const std::string& text) {
  if (text == "l2_norm_sum") return ReconstructionTerm::l2_norm_sum;
  if (text == "mean_squared") return ReconstructionTerm::mean_squared;
  throw std::invalid_argument("unknown reconstruction term '" + text + "'");
}

std::string to_string(Regularizer reg) { return reg == Regularizer::ridge ? "ridge" : "lasso"; }

Regularizer parse_regularizer(const std::string& text) {
  if (text == "ridge") return Regularizer::ridge;
  if (text == "lasso") return Regularizer::lasso;
  throw std::invalid_argument("unknown regularizer '" + text + "'");
}

void AAEConfig::validate() const {
  if (window_size < 1) throw std::invalid_argument("window size must be >= 1");
  if (latent_dim < 1) throw std::invalid_argument("latent dimension must be >= 1");
  if (encoder_units.empty() || decoder_units.empty())
    throw std::invalid_argument("encoder and decoder need at least one LSTM layer");
  for (auto u : encoder_units)
    if (u < 1) throw std::invalid_argument("encoder layer sizes must be positive");
  for (auto u : decoder_units)
    if (u < 1) throw std::invalid_argument("decoder layer sizes must be positive");
  if (critic_filters < 1 || critic_kernel < 1)
    throw std::invalid_argument("critic filters and kernel must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0,1)");
  if (!(range_high > range_low)) throw std::invalid_argument("normalization range is empty");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (critic_iterations < 1) throw std::invalid_argument("critic iterations must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::invalid_argument("decay must be in (0,1]");
  if (!(gp_weight >= 0.0) || !(reg_weight >= 0.0))
    throw std::invalid_argument("penalty weights must be non-negative");
  if (!(gp_fd_step > 0.0)) throw std::invalid_argument("gradient-penalty step must be positive");
}

void TrainReport::save_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.precision(17);
  out << "epoch,loss_ae,loss_cx,loss_cz,loss_enc,loss_dec\n";
  for (const auto& r : epochs)
    out << r.epoch << ',' << r.loss_ae << ',' << r.loss_cx << ',' << r.loss_cz << ','
        << r.loss_enc << ',' << r.loss_dec << '\n';
}

std::vector<LayerSpec> encoder_layers(const AAEConfig& c) {
  std::vector<LayerSpec> layers;
  for (std::size_t i = 0; i < c.encoder_units.size(); ++i) {
    const bool last = i + 1 == c.encoder_units.size();
    layers.push_back(LayerSpec::lstm(c.encoder_units[i], !last));
    layers.push_back(LayerSpec::dropout(c.dropout));
  }
  layers.push_back(LayerSpec::dense(static_cast<Index>(c.latent_dim)));
  return layers;
}

std::vector<LayerSpec> decoder_layers(const AAEConfig& c) {
  std::vector<LayerSpec> layers;
  for (std::size_t i = 0; i < c.decoder_units.size(); ++i) {
    layers.push_back(LayerSpec::lstm(c.decoder_units[i], true,
                                     i == 0 ? static_cast<Index>(c.window_size) : 0));
    layers.push_back(LayerSpec::dropout(c.dropout));
  }
  const bool tanh_range = c.range_low == -1.0 && c.range_high == 1.0;
  layers.push_back(
      LayerSpec::dense(1, tanh_range ? nn::Activation::tanh : nn::Activation::identity));
  return layers;
}

std::vector<LayerSpec> critic_layers(const AAEConfig& c) {
  return {LayerSpec::conv1d(c.critic_filters, c.critic_kernel, nn::Padding::valid,
                            nn::Activation::leaky_relu, c.critic_slope),
          LayerSpec::dropout(c.dropout), LayerSpec::dense(1, nn::Activation::identity, true)};
}

AAEModel build_model(const AAEConfig& config, std::uint64_t seed) {
  config.validate();
  AAEModel m;
  m.config = config;
  m.seed = seed;
  const auto n = static_cast<Index>(config.window_size);
  const auto d = static_cast<Index>(config.latent_dim);
  AAEConfig critic_z_config = config;
  critic_z_config.critic_kernel = std::min<Index>(config.critic_kernel, d);
  if (config.critic_kernel > n)
    throw std::invalid_argument("critic kernel longer than the window");
  m.encoder = nn::Network({n, 1}, encoder_layers(config));
  m.decoder = nn::Network({1, d}, decoder_layers(config));
  m.critic_x = nn::Network({n, 1}, critic_layers(config));
  m.critic_z = nn::Network({d, 1}, critic_layers(critic_z_config));
  Rng rng(seed);
  m.encoder.initialize(rng);
  m.decoder.initialize(rng);
  m.critic_x.initialize(rng);
  m.critic_z.initialize(rng);
  return m;
}

Tensor sequence_from_rows(const Matrix& rows) {
  return Tensor(Eigen::Map<const Matrix>(rows.data(), 1, rows.size()), rows.cols(), rows.rows());
}

Matrix rows_from_sequence(const Tensor& seq) {
  if (seq.features() != 1) throw std::invalid_argument("expected a one-feature sequence");
  return Eigen::Map<const Matrix>(seq.data.data(), seq.batch, seq.steps);
}

Tensor vector_from_rows(const Matrix& rows) { return Tensor(rows.transpose(), 1, rows.rows()); }

Matrix rows_from_vector(const Tensor& vec) {
  if (vec.steps != 1) throw std::invalid_argument("expected a single-step tensor");
  return vec.data.transpose();
}

Tensor vector_to_sequence(const Tensor& vec) { return sequence_from_rows(rows_from_vector(vec)); }

Tensor sequence_to_vector(const Tensor& seq) { return vector_from_rows(rows_from_sequence(seq)); }

Matrix gather_rows(const WindowMatrix& windows, const std::vector<std::size_t>& indices) {
  Matrix out(static_cast<Index>(indices.size()), windows.cols());
  for (std::size_t i = 0; i < indices.size(); ++i)
    out.row(static_cast<Index>(i)) = windows.row(static_cast<Index>(indices[i]));
  return out;
}

namespace {

constexpr Index kInferenceChunk = 512;

void require_cols(const Matrix& m, std::size_t expected, const char* what) {
  if (m.cols() != static_cast<Index>(expected))
    throw std::invalid_argument(std::string(what) + " has " + std::to_string(m.cols()) +
                                " columns, expected " + std::to_string(expected));
}

// Applies `fn` to row blocks so long inputs do not materialise one huge tensor.
template <typename Fn>
Matrix chunked(const Matrix& rows, Index out_cols, Fn fn) {
  Matrix out(rows.rows(), out_cols);
  for (Index start = 0; start < rows.rows(); start += kInferenceChunk) {
    const Index len = std::min(kInferenceChunk, rows.rows() - start);
    out.middleRows(start, len) = fn(Matrix(rows.middleRows(start, len)));
  }
  return out;
}

std::vector<double> to_vector(const Matrix& column) {
  return std::vector<double>(column.data(), column.data() + column.size());
}

double mean_output(const Tensor& t) { return t.data.mean(); }

Tensor constant_seed(double value, Index batch) {
  return Tensor(Matrix::Constant(1, batch, value), 1, batch);
}

void check_finite(double value, std::size_t epoch, const char* term) {
  if (!std::isfinite(value))
    throw TrainingError("non-finite " + std::string(term) + " loss at epoch " +
                        std::to_string(epoch));
}

}  // namespace

Matrix encode(const AAEModel& model, const Matrix& windows) {
  require_cols(windows, model.config.window_size, "window batch");
  return chunked(windows, static_cast<Index>(model.config.latent_dim), [&](const Matrix& block) {
    return rows_from_vector(model.encoder.forward(sequence_from_rows(block)));
  });
}

Matrix decode(const AAEModel& model, const Matrix& latents) {
  require_cols(latents, model.config.latent_dim, "latent batch");
  return chunked(latents, static_cast<Index>(model.config.window_size), [&](const Matrix& block) {
    return rows_from_sequence(model.decoder.forward(vector_from_rows(block)));
  });
}

Matrix reconstruct(const AAEModel& model, const Matrix& windows) {
  require_cols(windows, model.config.window_size, "window batch");
  return chunked(windows, static_cast<Index>(model.config.window_size), [&](const Matrix& block) {
    const Tensor z = model.encoder.forward(sequence_from_rows(block));
    return rows_from_sequence(model.decoder.forward(z));
  });
}

std::vector<double> critic_x_scores(const AAEModel& model, const Matrix& windows) {
  require_cols(windows, model.config.window_size, "window batch");
  return to_vector(chunked(windows, 1, [&](const Matrix& block) {
    return Matrix(model.critic_x.forward(sequence_from_rows(block)).data.transpose());
  }));
}

std::vector<double> critic_z_scores(const AAEModel& model, const Matrix& latents) {
  require_cols(latents, model.config.latent_dim, "latent batch");
  return to_vector(chunked(latents, 1, [&](const Matrix& block) {
    return Matrix(model.critic_z.forward(sequence_from_rows(block)).data.transpose());
  }));
}

std::vector<double> encode(const AAEModel& model, std::span<const double> window) {
  const Matrix row = Eigen::Map<const Matrix>(window.data(), 1, static_cast<Index>(window.size()));
  return to_vector(encode(model, row).transpose());
}

std::vector<double> decode(const AAEModel& model, std::span<const double> latent) {
  const Matrix row = Eigen::Map<const Matrix>(latent.data(), 1, static_cast<Index>(latent.size()));
  return to_vector(decode(model, row).transpose());
}

std::vector<double> reconstruct(const AAEModel& model, std::span<const double> window) {
  const Matrix row = Eigen::Map<const Matrix>(window.data(), 1, static_cast<Index>(window.size()));
  return to_vector(reconstruct(model, row).transpose());
}

namespace {

double weight_penalty(const AAEModel& model, Regularizer reg) {
  if (reg == Regularizer::ridge)
    return model.encoder.params().squared_norm() + model.decoder.params().squared_norm();
  return model.encoder.params().abs_sum() + model.decoder.params().abs_sum();
}

void add_penalty_grad(const nn::ParamSet& params, double weight, Regularizer reg,
                      nn::ParamSet& grads) {
  if (weight == 0.0) return;
  if (reg == Regularizer::ridge) {
    grads.flat() += 2.0 * weight * params.flat();
  } else {
    grads.flat() += weight * params.flat().unaryExpr([](double v) {
      return static_cast<double>((v > 0.0) - (v < 0.0));
    });
  }
}

// Reconstruction term value and its gradient with respect to the decoder
// output. `rec` and `target` are one-feature sequences.
double reconstruction_term(const Tensor& rec, const Tensor& target, ReconstructionTerm term,
                           Tensor* grad) {
  const Matrix diff = rows_from_sequence(rec) - rows_from_sequence(target);
  Matrix g(diff.rows(), diff.cols());
  double value = 0.0;
  if (term == ReconstructionTerm::l2_norm_sum) {
    for (Index b = 0; b < diff.rows(); ++b) {
      const double norm = diff.row(b).norm();
      value += norm;
      if (norm > 0.0) {
        g.row(b) = diff.row(b) / norm;
      } else {
        g.row(b).setZero();
      }
    }
  } else {
    const auto count = static_cast<double>(diff.size());
    value = diff.squaredNorm() / count;
    g = 2.0 * diff / count;
  }
  if (grad != nullptr) *grad = sequence_from_rows(g);
  return value;
}

double mean_squared(const Tensor& rec, const Tensor& target) {
  return (rec.data - target.data).squaredNorm() / static_cast<double>(rec.data.size());
}

}  // namespace

double loss_ae(const AAEModel& model, const Matrix& windows, double reg_weight, Regularizer reg) {
  if (windows.rows() == 0) throw std::invalid_argument("loss_ae needs a non-empty batch");
  const Matrix rec = reconstruct(model, windows);
  const double mse = (rec - windows).squaredNorm() / static_cast<double>(windows.size());
  return mse + reg_weight * weight_penalty(model, reg);
}

double wasserstein_loss_z(const AAEModel& model, const Matrix& real_windows,
                          const Matrix& prior_latents) {
  const auto prior = critic_z_scores(model, prior_latents);
  const auto encoded = critic_z_scores(model, encode(model, real_windows));
  const double a = std::accumulate(prior.begin(), prior.end(), 0.0) / static_cast<double>(prior.size());
  const double b =
      std::accumulate(encoded.begin(), encoded.end(), 0.0) / static_cast<double>(encoded.size());
  return a - b;
}

double wasserstein_loss_x(const AAEModel& model, const Matrix& real_windows,
                          const Matrix& prior_latents) {
  const auto real = critic_x_scores(model, real_windows);
  const auto decoded = critic_x_scores(model, decode(model, prior_latents));
  const double a = std::accumulate(real.begin(), real.end(), 0.0) / static_cast<double>(real.size());
  const double b =
      std::accumulate(decoded.begin(), decoded.end(), 0.0) / static_cast<double>(decoded.size());
  return a - b;
}

namespace {

std::vector<double> per_sample_norms(const Tensor& g) {
  std::vector<double> sq(static_cast<std::size_t>(g.batch), 0.0);
  for (Index j = 0; j < g.data.cols(); ++j)
    sq[static_cast<std::size_t>(j % g.batch)] += g.data.col(j).squaredNorm();
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

Tensor input_gradient(const nn::Network& critic, const Tensor& x, bool training, Rng* rng) {
  nn::ForwardCache cache;
  const Tensor out = critic.forward(x, training, rng, &cache);
  if (out.features() != 1 || out.steps != 1)
    throw std::invalid_argument("critic must emit one scalar per sample");
  return critic.backward(cache, constant_seed(1.0, x.batch), nullptr);
}

}  // namespace

std::vector<double> critic_input_gradient_norms(const nn::Network& critic, const Tensor& x) {
  return per_sample_norms(input_gradient(critic, x, false, nullptr));
}

double gradient_penalty(const nn::Network& critic, const Tensor& real, const Tensor& fake,
                        double lambda, Rng& rng, nn::ParamSet* grads,
                        const PenaltyOptions& options) {
  if (real.data.rows() != fake.data.rows() || real.data.cols() != fake.data.cols() ||
      real.steps != fake.steps || real.batch != fake.batch)
    throw std::invalid_argument("gradient penalty needs real and fake batches of equal shape");
  const Index batch = real.batch;
  std::vector<double> u(static_cast<std::size_t>(batch));
  for (auto& v : u) v = rng.uniform();
  Tensor mixed(real.features(), real.steps, batch);
  for (Index j = 0; j < real.data.cols(); ++j) {
    const double w = u[static_cast<std::size_t>(j % batch)];
    mixed.data.col(j) = w * real.data.col(j) + (1.0 - w) * fake.data.col(j);
  }

  // Dropout masks must match across the three critic evaluations below.
  const Rng mask_state = options.dropout_rng != nullptr ? *options.dropout_rng : Rng();
  const Tensor g = input_gradient(critic, mixed, options.training, options.dropout_rng);
  const auto norms = per_sample_norms(g);
  double value = 0.0;
  for (double n : norms) value += (n - 1.0) * (n - 1.0);
  value *= lambda / static_cast<double>(batch);

  if (grads != nullptr && lambda != 0.0) {
    Tensor direction = g;
    Matrix coeff(1, batch);
    for (Index b = 0; b < batch; ++b) {
      const double n = norms[static_cast<std::size_t>(b)];
      coeff(0, b) = 2.0 * lambda * (n - 1.0) / static_cast<double>(batch);
      const double scale = n > 0.0 ? 1.0 / n : 0.0;
      for (Index t = 0; t < g.steps; ++t) direction.data.col(t * batch + b) *= scale;
    }
    const double h = options.fd_step;
    const Tensor seed(coeff, 1, batch);
    auto param_grad = [&](double sign) {
      Tensor shifted(mixed.data + sign * h * direction.data, mixed.steps, batch);
      Rng masks = mask_state;
      nn::ForwardCache cache;
      critic.forward(shifted, options.training, options.dropout_rng ? &masks : nullptr, &cache);
      nn::ParamSet out = critic.params().zeros_like();
      critic.backward(cache, seed, &out);
      return out;
    };
    const nn::ParamSet plus = param_grad(1.0);
    const nn::ParamSet minus = param_grad(-1.0);
    grads->flat() += (plus.flat() - minus.flat()) / (2.0 * h);
  }
  return value;
}

GeneratorObjective generator_objective(const AAEModel& model, const Matrix& windows,
                                       const Matrix& prior_latents, const TrainConfig& config) {
  const Tensor x = sequence_from_rows(windows);
  const Tensor z = vector_from_rows(prior_latents);
  const Tensor latent = model.encoder.forward(x);
  const Tensor rec = model.decoder.forward(latent);
  const Tensor decoded = model.decoder.forward(z);
  GeneratorObjective obj;
  obj.critic_x_real = mean_output(model.critic_x.forward(x));
  obj.critic_x_decoded = mean_output(model.critic_x.forward(decoded));
  obj.critic_z_prior = mean_output(model.critic_z.forward(vector_to_sequence(z)));
  obj.critic_z_encoded = mean_output(model.critic_z.forward(vector_to_sequence(latent)));
  obj.reconstruction = reconstruction_term(rec, x, config.reconstruction, nullptr);
  if (config.reconstruction == ReconstructionTerm::mean_squared)
    obj.reconstruction += config.reg_weight * weight_penalty(model, config.regularizer);
  return obj;
}

namespace {

class Trainer {
 public:
  Trainer(AAEModel& model, const WindowSet& windows, const TrainConfig& config,
          const BatchCallback& on_batch)
      : m_(model), windows_(windows), cfg_(config), rng_(config.seed), on_batch_(on_batch) {
    nn::AdamConfig adam{config.learning_rate, config.lr_decay};
    opt_e_ = nn::Adam(adam, m_.encoder.params().size());
    opt_d_ = nn::Adam(adam, m_.decoder.params().size());
    opt_cx_ = nn::Adam(adam, m_.critic_x.params().size());
    opt_cz_ = nn::Adam(adam, m_.critic_z.params().size());
    order_.resize(windows.count());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  EpochRecord run_epoch(std::size_t epoch) {
    const auto started = std::chrono::steady_clock::now();
    epoch_ = epoch;
    const std::size_t n = windows_.count();
    const std::size_t b = cfg_.batch_size;
    std::vector<std::vector<std::size_t>> batches;
    if (cfg_.batches_per_epoch == 0) {
      shuffle(order_);
      for (std::size_t s = 0; s < n; s += b)
        batches.emplace_back(order_.begin() + static_cast<std::ptrdiff_t>(s),
                             order_.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + b)));
    } else {
      for (std::size_t k = 0; k < cfg_.batches_per_epoch; ++k) batches.push_back(sample_batch());
    }

    EpochRecord rec;
    rec.epoch = epoch + 1;
    for (const auto& idx : batches) {
      const Matrix xb = gather_rows(windows_.windows, idx);
      Matrix zb(xb.rows(), static_cast<Index>(m_.config.latent_dim));
      for (Index j = 0; j < zb.cols(); ++j)
        for (Index i = 0; i < zb.rows(); ++i) zb(i, j) = rng_.normal();
      if (on_batch_) {
        trace_ = BatchTrace{};
        trace_.epoch = epoch + 1;
        trace_.windows = xb;
        trace_.prior = zb;
        trace_.before = m_;
      }
      const Step s = cfg_.adversarial ? adversarial_step(xb, zb) : autoencoder_step(xb);
      if (on_batch_ && cfg_.adversarial) {
        trace_.loss_enc = s.enc;
        trace_.loss_dec = s.dec;
        on_batch_(trace_);
      }
      rec.loss_ae += s.mse;
      rec.loss_cx += s.cx;
      rec.loss_cz += s.cz;
      rec.loss_enc += s.enc;
      rec.loss_dec += s.dec;
    }
    const auto count = static_cast<double>(batches.size());
    rec.loss_ae /= count;
    rec.loss_cx /= count;
    rec.loss_cz /= count;
    rec.loss_enc /= count;
    rec.loss_dec /= count;
    for (auto* opt : {&opt_e_, &opt_d_, &opt_cx_, &opt_cz_}) opt->end_epoch();
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
  }

 private:
  struct Step {
    double mse = 0, cx = 0, cz = 0, enc = 0, dec = 0;
  };

  void shuffle(std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng_.below(i)]);
  }

  std::vector<std::size_t> sample_batch() {
    const std::size_t n = windows_.count();
    const std::size_t b = cfg_.batch_size;
    std::vector<std::size_t> idx(b);
    if (b > n) {
      for (auto& i : idx) i = rng_.below(n);
      return idx;
    }
    // Partial Fisher-Yates: the first b slots become a sample without replacement.
    for (std::size_t i = 0; i < b; ++i) std::swap(order_[i], order_[i + rng_.below(n - i)]);
    std::copy(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(b), idx.begin());
    return idx;
  }

  bool training() const { return m_.config.dropout > 0.0; }
  Rng* masks() { return &rng_; }

  double critic_update(nn::Network& critic, nn::Adam& opt, const Tensor& real, const Tensor& fake,
                       const char* term) {
    const Index batch = real.batch;
    nn::ParamSet grads = critic.params().zeros_like();
    nn::ForwardCache cache;
    const double real_mean = mean_output(critic.forward(real, training(), masks(), &cache));
    critic.backward(cache, constant_seed(-1.0 / static_cast<double>(batch), batch), &grads);
    const double fake_mean = mean_output(critic.forward(fake, training(), masks(), &cache));
    critic.backward(cache, constant_seed(1.0 / static_cast<double>(batch), batch), &grads);
    const double gp = gradient_penalty(critic, real, fake, cfg_.gp_weight, rng_, &grads,
                                       {training(), masks(), cfg_.gp_fd_step});
    // The critic maximises mean C(real) - mean C(fake); descend on the negation.
    const double loss = -(real_mean - fake_mean) + gp;
    check_finite(loss, epoch_ + 1, term);
    opt.step(critic.params(), grads);
    return loss;
  }

  Step adversarial_step(const Matrix& xb, const Matrix& zb) {
    Step s;
    const Tensor x = sequence_from_rows(xb);
    const Tensor z = vector_from_rows(zb);
    const Tensor z_seq = vector_to_sequence(z);
    const Index batch = x.batch;
    const double inv_b = 1.0 / static_cast<double>(batch);

    // Critics: the generator is frozen, so its outputs are fixed for all N_c rounds.
    const Tensor decoded = m_.decoder.forward(z, training(), masks());
    const Tensor encoded_seq = vector_to_sequence(m_.encoder.forward(x, training(), masks()));
    for (std::size_t l = 0; l < cfg_.critic_iterations; ++l) {
      s.cx += critic_update(m_.critic_x, opt_cx_, x, decoded, "critic_x");
      s.cz += critic_update(m_.critic_z, opt_cz_, z_seq, encoded_seq, "critic_z");
    }
    s.cx /= static_cast<double>(cfg_.critic_iterations);
    s.cz /= static_cast<double>(cfg_.critic_iterations);

    // Encoder update: gradient flows through C_z(E(x)) and the reconstruction.
    if (on_batch_) trace_.at_encoder = m_;
    {
      nn::ForwardCache ce, cd, cz;
      const Tensor latent = m_.encoder.forward(x, training(), masks(), &ce);
      const Tensor rec = m_.decoder.forward(latent, training(), masks(), &cd);
      Tensor drec;
      const double recon = reconstruction_term(rec, x, cfg_.reconstruction, &drec);
      Tensor dlatent = m_.decoder.backward(cd, drec, nullptr);
      const double cz_enc =
          mean_output(m_.critic_z.forward(vector_to_sequence(latent), training(), masks(), &cz));
      dlatent.data += sequence_to_vector(m_.critic_z.backward(cz, constant_seed(-inv_b, batch), nullptr)).data;
      nn::ParamSet grads = m_.encoder.params().zeros_like();
      m_.encoder.backward(ce, dlatent, &grads);
      double penalty = 0.0;
      if (cfg_.reconstruction == ReconstructionTerm::mean_squared) {
        penalty = cfg_.reg_weight * weight_penalty(m_, cfg_.regularizer);
        add_penalty_grad(m_.encoder.params(), cfg_.reg_weight, cfg_.regularizer, grads);
      }
      const double cx_real = mean_output(m_.critic_x.forward(x, training(), masks()));
      const double cx_dec = mean_output(m_.critic_x.forward(decoded, training(), masks()));
      const double cz_prior = mean_output(m_.critic_z.forward(z_seq, training(), masks()));
      s.enc = cx_real - cx_dec + cz_prior - cz_enc + recon + penalty;
      s.mse = mean_squared(rec, x);
      check_finite(s.enc, epoch_ + 1, "encoder");
      opt_e_.step(m_.encoder.params(), grads);
    }

    // Decoder update: gradient flows through C_x(D(z)) and the reconstruction.
    if (on_batch_) trace_.at_decoder = m_;
    {
      nn::ForwardCache cd1, cd2, cx;
      const Tensor latent = m_.encoder.forward(x, training(), masks());
      const Tensor rec = m_.decoder.forward(latent, training(), masks(), &cd1);
      Tensor drec;
      const double recon = reconstruction_term(rec, x, cfg_.reconstruction, &drec);
      nn::ParamSet grads = m_.decoder.params().zeros_like();
      m_.decoder.backward(cd1, drec, &grads);
      const Tensor fake = m_.decoder.forward(z, training(), masks(), &cd2);
      const double cx_dec = mean_output(m_.critic_x.forward(fake, training(), masks(), &cx));
      m_.decoder.backward(cd2, m_.critic_x.backward(cx, constant_seed(-inv_b, batch), nullptr),
                          &grads);
      double penalty = 0.0;
      if (cfg_.reconstruction == ReconstructionTerm::mean_squared) {
        penalty = cfg_.reg_weight * weight_penalty(m_, cfg_.regularizer);
        add_penalty_grad(m_.decoder.params(), cfg_.reg_weight, cfg_.regularizer, grads);
      }
      const double cx_real = mean_output(m_.critic_x.forward(x, training(), masks()));
      const double cz_prior = mean_output(m_.critic_z.forward(z_seq, training(), masks()));
      const double cz_enc =
          mean_output(m_.critic_z.forward(vector_to_sequence(latent), training(), masks()));
      s.dec = cx_real - cx_dec + cz_prior - cz_enc + recon + penalty;
      check_finite(s.dec, epoch_ + 1, "decoder");
      opt_d_.step(m_.decoder.params(), grads);
    }
    return s;
  }

  // Plain autoencoder: one joint encoder/decoder step on the mean squared
  // error plus weight penalty.
  Step autoencoder_step(const Matrix& xb) {
    Step s;
    const Tensor x = sequence_from_rows(xb);
    nn::ForwardCache ce, cd;
    const Tensor latent = m_.encoder.forward(x, training(), masks(), &ce);
    const Tensor rec = m_.decoder.forward(latent, training(), masks(), &cd);
    Tensor drec;
    const double mse = reconstruction_term(rec, x, ReconstructionTerm::mean_squared, &drec);
    nn::ParamSet grad_d = m_.decoder.params().zeros_like();
    nn::ParamSet grad_e = m_.encoder.params().zeros_like();
    m_.encoder.backward(ce, m_.decoder.backward(cd, drec, &grad_d), &grad_e);
    add_penalty_grad(m_.encoder.params(), cfg_.reg_weight, cfg_.regularizer, grad_e);
    add_penalty_grad(m_.decoder.params(), cfg_.reg_weight, cfg_.regularizer, grad_d);
    const double total = mse + cfg_.reg_weight * weight_penalty(m_, cfg_.regularizer);
    check_finite(total, epoch_ + 1, "autoencoder");
    opt_e_.step(m_.encoder.params(), grad_e);
    opt_d_.step(m_.decoder.params(), grad_d);
    s.mse = mse;
    s.enc = s.dec = total;
    return s;
  }

  AAEModel& m_;
  const WindowSet& windows_;
  TrainConfig cfg_;
  Rng rng_;
  nn::Adam opt_e_, opt_d_, opt_cx_, opt_cz_;
  std::vector<std::size_t> order_;
  std::size_t epoch_ = 0;
  const BatchCallback& on_batch_;
  BatchTrace trace_;
};

}  // namespace

std::pair<AAEModel, TrainReport> train(AAEModel model, const WindowSet& windows,
                                       const TrainConfig& config, const EpochCallback& on_epoch,
                                       const BatchCallback& on_batch) {
  config.validate();
  TrainReport report;
  if (config.epochs == 0) return {std::move(model), std::move(report)};
  if (windows.count() == 0) throw std::invalid_argument("training needs at least one window");
  if (windows.window_size != model.config.window_size)
    throw std::invalid_argument("window size " + std::to_string(windows.window_size) +
                                " does not match the model's " +
                                std::to_string(model.config.window_size));
  Trainer trainer(model, windows, config, on_batch);
  for (std::size_t e = 0; e < config.epochs; ++e) {
    report.epochs.push_back(trainer.run_epoch(e));
    ++model.epochs_completed;
    if (on_epoch) on_epoch(report.epochs.back());
  }
  return {std::move(model), std::move(report)};
}

}  // namespace fdia
