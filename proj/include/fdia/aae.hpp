#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdia/nn/adam.hpp"
#include "fdia/nn/network.hpp"
#include "fdia/rng.hpp"
#include "fdia/timeseries.hpp"

namespace fdia {

/// Architecture of the adversarial autoencoder.
///
/// Encoder: stacked LSTMs over the window, final hidden state -> dense latent.
/// Decoder: latent repeated over the window -> stacked LSTMs -> per-step dense
/// with tanh. Both critics: conv1d + LeakyReLU -> dropout -> dense scalar; the
/// latent critic reads the code as a one-channel sequence.
struct AAEConfig {
  std::size_t window_size = 40;
  std::size_t latent_dim = 20;
  std::vector<nn::Index> encoder_units{40, 40, 40};
  std::vector<nn::Index> decoder_units{40, 80, 40, 20};
  nn::Index critic_filters = 32;
  nn::Index critic_kernel = 5;
  double critic_slope = 0.2;
  double dropout = 0.2;
  double range_low = -1.0;
  double range_high = 1.0;

  void validate() const;
  bool operator==(const AAEConfig&) const = default;
};

/// How the encoder/decoder objective measures reconstruction.
enum class ReconstructionTerm {
  /// Sum over the batch of per-window Euclidean norms ||x - D(E(x))||_2.
  l2_norm_sum,
  /// Mean over all elements of the squared error, plus the weight penalty.
  mean_squared,
};

enum class Regularizer { ridge, lasso };

std::string to_string(ReconstructionTerm term);
ReconstructionTerm parse_reconstruction_term(const std::string& text);
std::string to_string(Regularizer reg);
Regularizer parse_regularizer(const std::string& text);

struct TrainConfig {
  std::size_t epochs = 2000;
  std::size_t batch_size = 64;
  std::size_t critic_iterations = 5;
  /// Batches drawn per epoch; 0 means one shuffled pass over every window.
  std::size_t batches_per_epoch = 1;
  double learning_rate = 1e-3;
  double lr_decay = 0.99;
  double gp_weight = 10.0;
  double reg_weight = 1e-4;
  ReconstructionTerm reconstruction = ReconstructionTerm::l2_norm_sum;
  Regularizer regularizer = Regularizer::ridge;
  /// False trains a plain autoencoder on the mean-squared term only.
  bool adversarial = true;
  /// Input-space step for the gradient-penalty parameter gradient.
  double gp_fd_step = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss_ae = 0.0;
  double loss_cx = 0.0;
  double loss_cz = 0.0;
  double loss_enc = 0.0;
  double loss_dec = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;

  /// `epoch,loss_ae,loss_cx,loss_cz,loss_enc,loss_dec` (wall time omitted so the
  /// file is reproducible).
  void save_csv(const std::filesystem::path& path) const;
};

struct AAEModel {
  AAEConfig config;
  nn::Network encoder;
  nn::Network decoder;
  nn::Network critic_x;
  nn::Network critic_z;
  std::uint64_t seed = 0;
  std::size_t epochs_completed = 0;
  /// Train-fitted scaling, carried so detection can reuse it.
  std::optional<NormalizationParams> normalization;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AAEModel build_model(const AAEConfig& config, std::uint64_t seed);

/// Layer stacks used by build_model, exposed for baselines and tests.
std::vector<nn::LayerSpec> encoder_layers(const AAEConfig& config);
std::vector<nn::LayerSpec> decoder_layers(const AAEConfig& config);
std::vector<nn::LayerSpec> critic_layers(const AAEConfig& config);

// Tensor layout helpers. A window batch is B x N matrix rows; as a tensor it is
// a one-feature, N-step sequence. A latent batch is B x d rows; as a tensor it
// is a d-feature single step.
nn::Tensor sequence_from_rows(const nn::Matrix& rows);
nn::Matrix rows_from_sequence(const nn::Tensor& seq);
nn::Tensor vector_from_rows(const nn::Matrix& rows);
nn::Matrix rows_from_vector(const nn::Tensor& vec);
/// d-feature single step -> one-feature d-step sequence, and back.
nn::Tensor vector_to_sequence(const nn::Tensor& vec);
nn::Tensor sequence_to_vector(const nn::Tensor& seq);

/// Inference-mode mappings (dropout off). Rows are windows / latent codes.
nn::Matrix encode(const AAEModel& model, const nn::Matrix& windows);
nn::Matrix decode(const AAEModel& model, const nn::Matrix& latents);
nn::Matrix reconstruct(const AAEModel& model, const nn::Matrix& windows);
std::vector<double> critic_x_scores(const AAEModel& model, const nn::Matrix& windows);
std::vector<double> critic_z_scores(const AAEModel& model, const nn::Matrix& latents);

std::vector<double> encode(const AAEModel& model, std::span<const double> window);
std::vector<double> decode(const AAEModel& model, std::span<const double> latent);
std::vector<double> reconstruct(const AAEModel& model, std::span<const double> window);

/// Mean squared reconstruction error over all elements plus
/// reg_weight * (sum theta^2 or sum |theta|) over encoder and decoder weights.
double loss_ae(const AAEModel& model, const nn::Matrix& windows, double reg_weight,
               Regularizer reg = Regularizer::ridge);

/// mean C_z(z) - mean C_z(E(x)).
double wasserstein_loss_z(const AAEModel& model, const nn::Matrix& real_windows,
                          const nn::Matrix& prior_latents);
/// mean C_x(x) - mean C_x(D(z)).
double wasserstein_loss_x(const AAEModel& model, const nn::Matrix& real_windows,
                          const nn::Matrix& prior_latents);

/// Penalty lambda * mean_i (||grad_x C(x_hat_i)||_2 - 1)^2 at
/// x_hat_i = u_i * real_i + (1 - u_i) * fake_i, u_i ~ U[0, 1] drawn from `rng`.
///
/// When `grads` is set, the penalty's parameter gradient is added to it. That
/// gradient needs the mixed derivative d/dtheta (v . grad_x C); it is formed as
/// a central difference of the parameter gradient along v in input space,
/// (grad_theta C(x_hat + h v) - grad_theta C(x_hat - h v)) / 2h, which is exact
/// for piecewise-linear critics away from kinks and O(h^2) otherwise.
struct PenaltyOptions {
  bool training = false;
  Rng* dropout_rng = nullptr;
  double fd_step = 1e-4;
};
double gradient_penalty(const nn::Network& critic, const nn::Tensor& real, const nn::Tensor& fake,
                        double lambda, Rng& rng, nn::ParamSet* grads = nullptr,
                        const PenaltyOptions& options = {});

/// Per-sample input-gradient norms of a critic, ||grad_x C(x_i)||_2.
std::vector<double> critic_input_gradient_norms(const nn::Network& critic, const nn::Tensor& x);

/// Terms of the shared encoder/decoder objective on one batch.
struct GeneratorObjective {
  double critic_x_real = 0.0;     // mean C_x(x)
  double critic_x_decoded = 0.0;  // mean C_x(D(z))
  double critic_z_prior = 0.0;    // mean C_z(z)
  double critic_z_encoded = 0.0;  // mean C_z(E(x))
  double reconstruction = 0.0;
  double total() const {
    return critic_x_real - critic_x_decoded + critic_z_prior - critic_z_encoded + reconstruction;
  }
};

/// The objective the encoder and decoder steps minimise, evaluated in
/// inference mode.
GeneratorObjective generator_objective(const AAEModel& model, const nn::Matrix& windows,
                                       const nn::Matrix& prior_latents, const TrainConfig& config);

/// Optional per-epoch observer (epoch record just appended).
using EpochCallback = std::function<void(const EpochRecord&)>;

/// One adversarial batch as the trainer saw it. `at_encoder` is the model when
/// the encoder objective was evaluated (critics updated, encoder and decoder
/// untouched); `at_decoder` likewise for the decoder step.
struct BatchTrace {
  std::size_t epoch = 0;
  nn::Matrix windows;
  nn::Matrix prior;
  AAEModel before;
  AAEModel at_encoder;
  AAEModel at_decoder;
  double loss_enc = 0.0;
  double loss_dec = 0.0;
};
using BatchCallback = std::function<void(const BatchTrace&)>;

/// Alternating critic / encoder / decoder optimisation. Each epoch draws
/// `batches_per_epoch` window batches (with a fresh prior batch each) and for
/// every batch runs critic_iterations updates of C_x then C_z, one encoder
/// update and one decoder update, each with the other networks frozen.
std::pair<AAEModel, TrainReport> train(AAEModel model, const WindowSet& windows,
                                       const TrainConfig& config, const EpochCallback& on_epoch = {},
                                       const BatchCallback& on_batch = {});

/// Rows `indices` of a window set as a B x N matrix.
nn::Matrix gather_rows(const WindowMatrix& windows, const std::vector<std::size_t>& indices);

}  // namespace fdia
