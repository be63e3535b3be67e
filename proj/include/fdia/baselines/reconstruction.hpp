#pragma once

#include <cstdint>
#include <string>

#include "fdia/aae.hpp"
#include "fdia/scoring.hpp"

namespace fdia::baselines {

enum class BaselineKind { ae_lstm, ae_cnn, ae_fc, kmeans, linreg, ocsvm };
std::string to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(const std::string& text);

/// How a batch of windows or codes is presented to a network.
enum class Layout {
  /// One feature per step, one step per sample point.
  sequence,
  /// A single step holding every value as a feature.
  vector,
};

/// Encoder/decoder pair trained on reconstruction alone. The encoder always
/// emits a single-step code.
struct Autoencoder {
  std::string name;
  std::size_t window_size = 0;
  std::size_t latent_dim = 0;
  Layout input = Layout::sequence;
  Layout decoder_input = Layout::vector;
  Layout output = Layout::sequence;
  nn::Network encoder;
  nn::Network decoder;
};

/// Conv 64 (k5) -> conv 32 (k3) -> dense code; code as a one-channel sequence
/// -> conv 32 (k3) -> conv 64 (k5) -> dense window with tanh.
Autoencoder build_ae_cnn(std::size_t window_size, std::size_t latent_dim, std::uint64_t seed);
/// Dense 100 -> 100 -> code; dense 100 -> 100 -> window with tanh.
Autoencoder build_ae_fc(std::size_t window_size, std::size_t latent_dim, std::uint64_t seed);

/// Inference-mode reconstruction of window rows.
nn::Matrix reconstruct(const Autoencoder& ae, const nn::Matrix& windows);

/// Mean squared error plus weight penalty, Adam with per-epoch decay, same
/// batching rules as the adversarial trainer. Uses epochs, batch_size,
/// batches_per_epoch, learning_rate, lr_decay, reg_weight, regularizer, seed.
Autoencoder train_autoencoder(Autoencoder ae, const WindowSet& windows, const TrainConfig& config);

/// The recurrent baseline: the adversarial model's encoder and decoder trained
/// without critics.
AAEModel train_ae_lstm(const AAEConfig& config, const WindowSet& windows,
                       const TrainConfig& train_config, std::uint64_t init_seed);

class AutoencoderWindowModel : public WindowModel {
 public:
  explicit AutoencoderWindowModel(const Autoencoder& ae) : ae_(&ae) {}
  std::size_t window_size() const override { return ae_->window_size; }
  nn::Matrix reconstruct(const nn::Matrix& windows) const override {
    return baselines::reconstruct(*ae_, windows);
  }

 private:
  const Autoencoder* ae_;
};

}  // namespace fdia::baselines
