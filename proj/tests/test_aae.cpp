#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fdia/aae.hpp"
#include "oracles.hpp"

using namespace fdia;
using nn::Matrix;

namespace {

AAEConfig tiny_config() {
  AAEConfig c;
  c.window_size = 6;
  c.latent_dim = 3;
  c.encoder_units = {4};
  c.decoder_units = {4};
  c.critic_filters = 2;
  c.critic_kernel = 2;
  c.dropout = 0.0;
  return c;
}

TrainConfig tiny_train(std::size_t epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 8;
  t.critic_iterations = 2;
  t.seed = 11;
  return t;
}

WindowSet sine_windows(std::size_t length, std::size_t window, double phase = 0.0) {
  std::vector<double> v(length);
  for (std::size_t i = 0; i < length; ++i)
    v[i] = 0.6 * std::sin(2 * std::numbers::pi * static_cast<double>(i) / 24.0 + phase);
  return make_windows(v, window, 1);
}

Matrix constant_rows(Eigen::Index rows, Eigen::Index cols, double value) {
  return Matrix::Constant(rows, cols, value);
}

std::size_t last_entry(const nn::ParamSet& p) { return p.entries().size() - 1; }

void make_constant(nn::Network& net, double value) {
  net.params().set_zero();
  net.params().matrix(last_entry(net.params()))(0, 0) = value;
}

double mean_single(const nn::Network& net, const nn::Tensor& batch) {
  // Evaluates one sample at a time so no batched code path is shared.
  double sum = 0.0;
  for (Eigen::Index b = 0; b < batch.batch; ++b) {
    nn::Tensor one(batch.features(), batch.steps, 1);
    for (Eigen::Index t = 0; t < batch.steps; ++t) one.step(t) = batch.data.col(t * batch.batch + b);
    sum += net.forward(one).data(0, 0);
  }
  return sum / static_cast<double>(batch.batch);
}

}  // namespace

TEST(BuildModel, DefaultShapes) {
  const AAEModel m = build_model(AAEConfig{}, 1);
  EXPECT_EQ(m.encoder.input_shape(), (nn::Shape{40, 1}));
  EXPECT_EQ(m.encoder.output_shape(), (nn::Shape{1, 20}));
  EXPECT_EQ(m.decoder.output_shape(), (nn::Shape{40, 1}));
  EXPECT_EQ(m.critic_x.output_shape(), (nn::Shape{1, 1}));
  EXPECT_EQ(m.critic_z.output_shape(), (nn::Shape{1, 1}));
  const std::vector<double> w(40, 0.1);
  EXPECT_EQ(encode(m, w).size(), 20u);
  EXPECT_EQ(decode(m, std::vector<double>(20, 0.0)).size(), 40u);
}

TEST(BuildModel, SeedDeterminesParameters) {
  const AAEModel a = build_model(tiny_config(), 5), b = build_model(tiny_config(), 5);
  const AAEModel c = build_model(tiny_config(), 6);
  EXPECT_EQ(a.encoder.params().flat(), b.encoder.params().flat());
  EXPECT_EQ(a.critic_z.params().flat(), b.critic_z.params().flat());
  EXPECT_NE(a.decoder.params().flat(), c.decoder.params().flat());
}

TEST(BuildModel, RejectsBadConfig) {
  AAEConfig c = tiny_config();
  c.latent_dim = 0;
  EXPECT_THROW(build_model(c, 1), std::invalid_argument);
  c = tiny_config();
  c.critic_kernel = 7;
  EXPECT_THROW(build_model(c, 1), std::invalid_argument);
}

TEST(BuildModel, DecoderActivationFollowsRange) {
  AAEConfig c = tiny_config();
  EXPECT_EQ(decoder_layers(c).back().activation, nn::Activation::tanh);
  c.range_low = 0.0;
  EXPECT_EQ(decoder_layers(c).back().activation, nn::Activation::identity);
}

TEST(Inference, ReconstructIsDeterministicAndComposes) {
  const AAEModel m = build_model(tiny_config(), 2);
  const Matrix x = gather_rows(sine_windows(40, 6).windows, {0, 5, 9});
  EXPECT_EQ(reconstruct(m, x), reconstruct(m, x));
  EXPECT_EQ(reconstruct(m, x), decode(m, encode(m, x)));
  EXPECT_THROW(encode(m, constant_rows(2, 5, 0.0)), std::invalid_argument);
}

TEST(Inference, DecodeStaysInsideTanhRange) {
  const AAEModel m = build_model(tiny_config(), 3);
  Rng rng(4);
  Matrix z(50, 3);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = 100.0 * rng.normal();
  const Matrix out = decode(m, z);
  EXPECT_LT(out.cwiseAbs().maxCoeff(), 1.0);
}

TEST(LossAE, MeanOverElementsConvention) {
  AAEModel m = build_model(tiny_config(), 1);
  m.decoder.params().set_zero();
  m.decoder.params().matrix(last_entry(m.decoder.params()))(0, 0) = std::atanh(0.5);
  // Decoder emits 0.5 everywhere, so these windows reconstruct as x + 1.
  EXPECT_NEAR(loss_ae(m, constant_rows(1, 6, -0.5), 0.0), 1.0, 1e-15);
  EXPECT_NEAR(loss_ae(m, constant_rows(3, 6, -0.5), 0.0), 1.0, 1e-15);
}

TEST(LossAE, PerfectReconstructionIsolatesPenalty) {
  AAEModel m = build_model(tiny_config(), 1);
  m.decoder.params().set_zero();
  m.decoder.params().matrix(last_entry(m.decoder.params()))(0, 0) = std::atanh(0.5);
  const Matrix x = constant_rows(2, 6, 0.5);
  EXPECT_NEAR(loss_ae(m, x, 0.0), 0.0, 1e-15);
  double sq = 0.0, abs = 0.0;
  for (const auto* net : {&m.encoder, &m.decoder})
    for (Eigen::Index i = 0; i < net->params().size(); ++i) {
      sq += net->params().flat()[i] * net->params().flat()[i];
      abs += std::abs(net->params().flat()[i]);
    }
  EXPECT_NEAR(loss_ae(m, x, 1e-3), 1e-3 * sq, 1e-15);
  EXPECT_NEAR(loss_ae(m, x, 1e-3, Regularizer::lasso), 1e-3 * abs, 1e-15);
  EXPECT_THROW(loss_ae(m, Matrix(0, 6), 0.0), std::invalid_argument);
}

TEST(Wasserstein, ConstantCriticsCancel) {
  AAEModel m = build_model(tiny_config(), 7);
  make_constant(m.critic_x, 3.25);
  make_constant(m.critic_z, -1.5);
  const Matrix x = gather_rows(sine_windows(30, 6).windows, {0, 1, 2, 3});
  Rng rng(1);
  Matrix z(4, 3);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  EXPECT_EQ(wasserstein_loss_z(m, x, z), 0.0);
  EXPECT_EQ(wasserstein_loss_x(m, x, z), 0.0);
}

TEST(Wasserstein, LinearLatentCritic) {
  AAEModel m = build_model(tiny_config(), 7);
  // Encoder emits v for every window.
  m.encoder.params().set_zero();
  const Eigen::Vector3d v(0.7, 0.2, 0.4);
  m.encoder.params().matrix(last_entry(m.encoder.params())).col(0) = v;
  // C_z(z) = z_1: filter 0 copies the sequence, dense reads step 0 of filter 0.
  auto& p = m.critic_z.params();
  p.set_zero();
  p.matrix(0)(0, 0) = 1.0;
  p.matrix(2)(0, 0) = 1.0;
  const Matrix x = gather_rows(sine_windows(30, 6).windows, {0, 4});
  EXPECT_DOUBLE_EQ(wasserstein_loss_z(m, x, Matrix::Zero(2, 3)), -v[0]);
}

TEST(Wasserstein, MeanWindowCritic) {
  AAEModel m = build_model(tiny_config(), 7);
  m.decoder.params().set_zero();  // decodes every latent to 0
  auto& p = m.critic_x.params();
  p.set_zero();
  p.matrix(0)(0, 0) = 1.0;
  const Eigen::Index t_out = 6 - 2 + 1;
  for (Eigen::Index t = 0; t < t_out; ++t) p.matrix(2)(0, t * 2) = 1.0 / static_cast<double>(t_out);
  EXPECT_NEAR(wasserstein_loss_x(m, constant_rows(3, 6, 1.0), Matrix::Zero(3, 3)), 1.0, 1e-15);
}

TEST(Wasserstein, TermByTermOracle) {
  const AAEModel m = build_model(tiny_config(), 21);
  const Matrix x = gather_rows(sine_windows(50, 6).windows, {3, 17, 8, 30, 1});
  Rng rng(2);
  Matrix z(5, 3);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();

  const auto enc = m.encoder.forward(sequence_from_rows(x));
  const double wz = mean_single(m.critic_z, vector_to_sequence(vector_from_rows(z))) -
                    mean_single(m.critic_z, vector_to_sequence(enc));
  const double wx = mean_single(m.critic_x, sequence_from_rows(x)) -
                    mean_single(m.critic_x, m.decoder.forward(vector_from_rows(z)));
  EXPECT_NEAR(wasserstein_loss_z(m, x, z), wz, 1e-13);
  EXPECT_NEAR(wasserstein_loss_x(m, x, z), wx, 1e-13);
}

TEST(GradientPenalty, FixedPoints) {
  const double lambda = 10.0;
  Rng rng(1);
  const nn::Tensor real = oracle::random_tensor(1, 1, 4, 3), fake = oracle::random_tensor(1, 1, 4, 4);

  nn::Network unit({1, 1}, {nn::LayerSpec::dense(1)});
  unit.params().flat() << 1.0, 0.3;
  EXPECT_EQ(gradient_penalty(unit, real, fake, lambda, rng), 0.0);

  nn::Network constant({1, 1}, {nn::LayerSpec::dense(1)});
  constant.params().flat() << 0.0, 0.3;
  EXPECT_EQ(gradient_penalty(constant, real, fake, lambda, rng), lambda);

  nn::Network slope2({1, 1}, {nn::LayerSpec::dense(1)});
  slope2.params().flat() << 2.0, 0.0;
  EXPECT_EQ(gradient_penalty(slope2, real, fake, lambda, rng), lambda);
}

TEST(GradientPenalty, NonNegativeAndMatchesNorms) {
  const AAEModel m = build_model(tiny_config(), 9);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const nn::Tensor real = oracle::random_tensor(1, 6, 3, s), fake = oracle::random_tensor(1, 6, 3, s + 50);
    Rng a(s), b(s);
    const double gp = gradient_penalty(m.critic_x, real, fake, 10.0, a);
    EXPECT_GE(gp, 0.0);
    // Replay the interpolation draws and recompute the norms independently.
    nn::Tensor mixed = real;
    std::vector<double> u(3);
    for (auto& v : u) v = b.uniform();
    for (Eigen::Index j = 0; j < mixed.data.cols(); ++j)
      mixed.data.col(j) = u[j % 3] * real.data.col(j) + (1 - u[j % 3]) * fake.data.col(j);
    double expect = 0.0;
    for (double n : critic_input_gradient_norms(m.critic_x, mixed)) expect += (n - 1) * (n - 1);
    EXPECT_NEAR(gp, 10.0 * expect / 3.0, 1e-12);
  }
}

TEST(GradientPenalty, ParameterGradientMatchesFiniteDifference) {
  AAEModel m = build_model(tiny_config(), 13);
  auto& critic = m.critic_x;
  const nn::Tensor real = oracle::random_tensor(1, 6, 4, 1), fake = oracle::random_tensor(1, 6, 4, 2);
  nn::ParamSet grads = critic.params().zeros_like();
  Rng r0(5);
  gradient_penalty(critic, real, fake, 10.0, r0, &grads, {false, nullptr, 1e-6});
  Eigen::VectorXd numeric(critic.params().size());
  for (Eigen::Index i = 0; i < numeric.size(); ++i) {
    const double keep = critic.params().flat()[i];
    const double h = 1e-6;
    critic.params().flat()[i] = keep + h;
    Rng r1(5);
    const double up = gradient_penalty(critic, real, fake, 10.0, r1);
    critic.params().flat()[i] = keep - h;
    Rng r2(5);
    const double down = gradient_penalty(critic, real, fake, 10.0, r2);
    critic.params().flat()[i] = keep;
    numeric[i] = (up - down) / (2 * h);
  }
  EXPECT_LE(oracle::relative_error(grads.flat(), numeric), 1e-4);
}

TEST(Train, ZeroEpochsReturnsModelUnchanged) {
  const AAEModel m = build_model(tiny_config(), 1);
  auto [out, report] = train(m, sine_windows(60, 6), tiny_train(0));
  EXPECT_TRUE(report.epochs.empty());
  EXPECT_EQ(out.encoder.params().flat(), m.encoder.params().flat());
  EXPECT_EQ(out.critic_x.params().flat(), m.critic_x.params().flat());
  EXPECT_EQ(out.epochs_completed, 0u);
}

TEST(Train, SeededRunsAreIdentical) {
  AAEConfig c = tiny_config();
  c.dropout = 0.2;
  const WindowSet w = sine_windows(80, 6);
  auto [a, ra] = train(build_model(c, 1), w, tiny_train(4));
  auto [b, rb] = train(build_model(c, 1), w, tiny_train(4));
  EXPECT_EQ(a.encoder.params().flat(), b.encoder.params().flat());
  EXPECT_EQ(a.decoder.params().flat(), b.decoder.params().flat());
  EXPECT_EQ(a.critic_x.params().flat(), b.critic_x.params().flat());
  EXPECT_EQ(a.critic_z.params().flat(), b.critic_z.params().flat());
  ASSERT_EQ(ra.epochs.size(), 4u);
  EXPECT_EQ(ra.epochs.back().loss_dec, rb.epochs.back().loss_dec);
  EXPECT_EQ(a.epochs_completed, 4u);
}

TEST(Train, BatchLargerThanWindowCountSamplesWithReplacement) {
  TrainConfig t = tiny_train(2);
  t.batch_size = 64;
  EXPECT_NO_THROW(train(build_model(tiny_config(), 1), sine_windows(12, 6), t));
}

TEST(Train, NonFiniteLossNamesEpochAndTerm) {
  WindowSet w = sine_windows(30, 6);
  w.windows(0, 0) = std::numeric_limits<double>::quiet_NaN();
  TrainConfig t = tiny_train(1);
  t.batch_size = static_cast<std::size_t>(w.count());
  try {
    train(build_model(tiny_config(), 1), w, t);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("critic_x"), std::string::npos) << msg;
  }
}

TEST(Train, FreezingDiscipline) {
  std::vector<BatchTrace> traces;
  TrainConfig t = tiny_train(2);
  auto [out, report] = train(build_model(tiny_config(), 3), sine_windows(60, 6), t, {},
                             [&](const BatchTrace& tr) { traces.push_back(tr); });
  ASSERT_EQ(traces.size(), 2u);
  for (const auto& tr : traces) {
    // Critic phase: only the critics move.
    EXPECT_EQ(tr.at_encoder.encoder.params().flat(), tr.before.encoder.params().flat());
    EXPECT_EQ(tr.at_encoder.decoder.params().flat(), tr.before.decoder.params().flat());
    EXPECT_NE(tr.at_encoder.critic_x.params().flat(), tr.before.critic_x.params().flat());
    EXPECT_NE(tr.at_encoder.critic_z.params().flat(), tr.before.critic_z.params().flat());
    // Encoder step: only the encoder moves.
    EXPECT_NE(tr.at_decoder.encoder.params().flat(), tr.at_encoder.encoder.params().flat());
    EXPECT_EQ(tr.at_decoder.decoder.params().flat(), tr.at_encoder.decoder.params().flat());
    EXPECT_EQ(tr.at_decoder.critic_x.params().flat(), tr.at_encoder.critic_x.params().flat());
    EXPECT_EQ(tr.at_decoder.critic_z.params().flat(), tr.at_encoder.critic_z.params().flat());
  }
  // Decoder step of the last batch: only the decoder moves.
  const auto& last = traces.back();
  EXPECT_EQ(out.encoder.params().flat(), last.at_decoder.encoder.params().flat());
  EXPECT_NE(out.decoder.params().flat(), last.at_decoder.decoder.params().flat());
  EXPECT_EQ(out.critic_x.params().flat(), last.at_decoder.critic_x.params().flat());
  EXPECT_EQ(out.critic_z.params().flat(), last.at_decoder.critic_z.params().flat());
}

TEST(Train, ObjectiveMatchesRecomposedLosses) {
  for (auto term : {ReconstructionTerm::l2_norm_sum, ReconstructionTerm::mean_squared}) {
    std::vector<BatchTrace> traces;
    TrainConfig t = tiny_train(2);
    t.reconstruction = term;
    train(build_model(tiny_config(), 4), sine_windows(60, 6), t, {},
          [&](const BatchTrace& tr) { traces.push_back(tr); });
    for (const auto& tr : traces) {
      auto recomposed = [&](const AAEModel& m) {
        const Matrix diff = reconstruct(m, tr.windows) - tr.windows;
        double recon = 0.0;
        if (term == ReconstructionTerm::l2_norm_sum) {
          for (Eigen::Index b = 0; b < diff.rows(); ++b) recon += diff.row(b).norm();
        } else {
          recon = loss_ae(m, tr.windows, t.reg_weight, t.regularizer);
        }
        return recon + wasserstein_loss_z(m, tr.windows, tr.prior) +
               wasserstein_loss_x(m, tr.windows, tr.prior);
      };
      EXPECT_NEAR(tr.loss_enc, recomposed(tr.at_encoder), 1e-10);
      EXPECT_NEAR(tr.loss_dec, recomposed(tr.at_decoder), 1e-10);
      EXPECT_NEAR(generator_objective(tr.at_encoder, tr.windows, tr.prior, t).total(),
                  recomposed(tr.at_encoder), 1e-10);
    }
  }
}

TEST(Train, LearnsToSeparateShiftedWindows) {
  AAEConfig c = tiny_config();
  c.window_size = 12;
  c.latent_dim = 4;
  c.encoder_units = {8};
  c.decoder_units = {8};
  c.critic_kernel = 3;
  TrainConfig t = tiny_train(150);
  t.batch_size = 16;
  t.lr_decay = 1.0;
  t.learning_rate = 5e-3;
  const WindowSet train_w = sine_windows(400, 12);
  auto [m, report] = train(build_model(c, 2), train_w, t);
  const WindowSet held = sine_windows(200, 12, 0.3);
  Matrix attacked = held.windows;
  attacked.array() -= 0.35;
  const double normal = (reconstruct(m, held.windows) - Matrix(held.windows)).squaredNorm();
  const double shifted = (reconstruct(m, attacked) - attacked).squaredNorm();
  EXPECT_LT(normal, shifted);
  EXPECT_LT(report.epochs.back().loss_ae, report.epochs.front().loss_ae);
}
