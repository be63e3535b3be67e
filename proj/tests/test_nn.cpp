#include <gtest/gtest.h>

#include "fdia/nn/adam.hpp"
#include "fdia/nn/network.hpp"
#include "oracles.hpp"

using namespace fdia;
using namespace fdia::nn;

namespace {

Network make(Shape in, std::vector<LayerSpec> specs, std::uint64_t seed = 1) {
  Network net(in, std::move(specs));
  Rng rng(seed);
  net.initialize(rng);
  // Non-zero biases so their gradients are exercised away from the init point.
  for (Index i = 0; i < net.params().size(); ++i) net.params().flat()[i] += 0.05 * rng.normal();
  return net;
}

constexpr double kTol = 1e-4;

}  // namespace

TEST(Layers, DenseWithZeroWeightsEmitsBias) {
  Network net({1, 3}, {LayerSpec::dense(2)});
  net.params().set_zero();
  net.params().matrix(1) << 0.5, -2.0;
  const Tensor y = net.forward(oracle::random_tensor(3, 1, 4, 2));
  for (Index b = 0; b < 4; ++b) {
    EXPECT_EQ(y.data(0, b), 0.5);
    EXPECT_EQ(y.data(1, b), -2.0);
  }
}

TEST(Layers, ZeroRateDropoutIsIdentity) {
  Network net({5, 2}, {LayerSpec::dropout(0.0)});
  const Tensor x = oracle::random_tensor(2, 5, 3, 4);
  Rng rng(1);
  EXPECT_EQ(net.forward(x, true, &rng).data, x.data);
  EXPECT_EQ(net.forward(x, false).data, x.data);
}

TEST(Layers, UnitKernelConvIsIdentity) {
  Network net({6, 1}, {LayerSpec::conv1d(1, 1)});
  net.params().flat() << 1.0, 0.0;
  const Tensor x = oracle::random_tensor(1, 6, 2, 5);
  EXPECT_EQ(net.forward(x).data, x.data);
}

TEST(Layers, ShapeMismatchThrows) {
  Network net({4, 1}, {LayerSpec::dense(2)});
  EXPECT_THROW(net.forward(oracle::random_tensor(1, 5, 1, 1)), std::invalid_argument);
  EXPECT_THROW(LayerSpec::dropout(1.0).validate(), std::invalid_argument);
  EXPECT_THROW(Network({3, 1}, {LayerSpec::conv1d(2, 5)}), std::invalid_argument);
}

TEST(Layers, InferenceIsPure) {
  Network net = make({8, 1}, {LayerSpec::lstm(4), LayerSpec::dropout(0.5), LayerSpec::dense(1)});
  const Tensor x = oracle::random_tensor(1, 8, 3, 9);
  EXPECT_EQ(net.forward(x).data, net.forward(x).data);
}

TEST(Gradients, Dense) {
  for (auto act : {Activation::identity, Activation::tanh, Activation::relu, Activation::leaky_relu}) {
    Network net = make({3, 4}, {LayerSpec::dense(3, act)});
    const auto r = oracle::check_gradients(net, oracle::random_tensor(4, 3, 2, 1), false, 1);
    EXPECT_LE(r.param_error, kTol) << to_string(act);
    EXPECT_LE(r.input_error, kTol) << to_string(act);
  }
  Network flat = make({4, 2}, {LayerSpec::dense(3, Activation::tanh, true)});
  const auto r = oracle::check_gradients(flat, oracle::random_tensor(2, 4, 3, 2), false, 2);
  EXPECT_LE(r.param_error, kTol);
  EXPECT_LE(r.input_error, kTol);
}

TEST(Gradients, Lstm) {
  for (bool seq : {true, false}) {
    Network net = make({5, 2}, {LayerSpec::lstm(3, seq)});
    const auto r = oracle::check_gradients(net, oracle::random_tensor(2, 5, 2, 3), false, 3);
    EXPECT_LE(r.param_error, kTol);
    EXPECT_LE(r.input_error, kTol);
  }
  Network rep = make({1, 3}, {LayerSpec::lstm(2, true, 4)});
  const auto r = oracle::check_gradients(rep, oracle::random_tensor(3, 1, 2, 4), false, 4);
  EXPECT_LE(r.param_error, kTol);
  EXPECT_LE(r.input_error, kTol);
}

TEST(Gradients, Conv1d) {
  for (auto pad : {Padding::valid, Padding::same})
    for (Index k : {1, 2, 3}) {
      Network net = make({6, 2}, {LayerSpec::conv1d(3, k, pad, Activation::leaky_relu)});
      const auto r = oracle::check_gradients(net, oracle::random_tensor(2, 6, 2, 5), false, 5);
      EXPECT_LE(r.param_error, kTol) << k;
      EXPECT_LE(r.input_error, kTol) << k;
    }
}

TEST(Gradients, DropoutAndActivation) {
  Network drop = make({4, 3}, {LayerSpec::dropout(0.4)});
  EXPECT_LE(oracle::check_gradients(drop, oracle::random_tensor(3, 4, 2, 6), true, 6).input_error, kTol);
  for (auto act : {Activation::tanh, Activation::relu, Activation::leaky_relu}) {
    Network a = make({4, 3}, {LayerSpec::activation_layer(act)});
    EXPECT_LE(oracle::check_gradients(a, oracle::random_tensor(3, 4, 2, 7), false, 7).input_error, kTol);
  }
}

TEST(Gradients, StackedTinyNetwork) {
  Network net = make({4, 1}, {LayerSpec::lstm(2), LayerSpec::dense(2, Activation::tanh),
                              LayerSpec::dropout(0.3),
                              LayerSpec::conv1d(1, 2, Padding::valid, Activation::leaky_relu),
                              LayerSpec::dense(1, Activation::identity, true)});
  ASSERT_LE(net.params().size(), 50);
  const auto r = oracle::check_gradients(net, oracle::random_tensor(1, 4, 3, 8), true, 8);
  EXPECT_LE(r.param_error, kTol);
  EXPECT_LE(r.input_error, kTol);
}

TEST(ParamSet, FlatRoundTrip) {
  Network net = make({3, 2}, {LayerSpec::lstm(3), LayerSpec::dense(1)});
  const Vector saved = net.params().flat();
  Network other = make({3, 2}, {LayerSpec::lstm(3), LayerSpec::dense(1)}, 99);
  other.params().assign(saved);
  EXPECT_EQ(other.params().flat(), saved);
  EXPECT_THROW(other.params().assign(Vector::Zero(3)), std::invalid_argument);
  Index total = 0;
  for (const auto& e : net.params().entries()) total += e.size();
  EXPECT_EQ(total, net.params().size());
}

TEST(Adam, ZeroGradientLeavesParamsAndCountsStep) {
  ParamSet p;
  p.add("w", 2, 1);
  p.flat() << 1.0, -2.0;
  Adam opt({}, 2);
  opt.step(p, p.zeros_like());
  EXPECT_EQ(p.flat(), (Vector(2) << 1.0, -2.0).finished());
  EXPECT_EQ(opt.steps(), 1);
}

TEST(Adam, DecayAfterEpoch) {
  Adam opt({}, 1);
  EXPECT_DOUBLE_EQ(opt.effective_rate(), 0.001);
  opt.end_epoch();
  EXPECT_DOUBLE_EQ(opt.effective_rate(), 0.001 * 0.99);
}

TEST(Adam, QuadraticGradientIsDescended) {
  // loss = 0.5 * |theta|^2 has gradient theta.
  ParamSet p;
  p.add("w", 1, 1);
  p.flat() << 3.0;
  Adam opt({0.1, 1.0}, 1);
  double prev = 3.0;
  for (int i = 0; i < 20; ++i) {
    ParamSet g = p.zeros_like();
    g.flat() << 1.0;
    opt.step(p, g);
    EXPECT_LT(p.flat()[0], prev);
    prev = p.flat()[0];
  }
}
