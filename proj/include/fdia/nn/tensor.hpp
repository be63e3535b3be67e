#pragma once

#include <Eigen/Dense>

namespace fdia::nn {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Batch of equal-length sequences.
///
/// `data` is features x (steps * batch); step t of every sample occupies the
/// column block [t * batch, (t + 1) * batch). A plain feature vector is a
/// one-step sequence.
struct Tensor {
  Matrix data;
  Index steps = 0;
  Index batch = 0;

  Tensor() = default;
  Tensor(Index features, Index steps_, Index batch_)
      : data(Matrix::Zero(features, steps_ * batch_)), steps(steps_), batch(batch_) {}
  Tensor(Matrix m, Index steps_, Index batch_) : data(std::move(m)), steps(steps_), batch(batch_) {}

  Index features() const { return data.rows(); }
  auto step(Index t) { return data.middleCols(t * batch, batch); }
  auto step(Index t) const { return data.middleCols(t * batch, batch); }
};

/// Shape of a single sample: sequence length and features per step.
struct Shape {
  Index steps = 1;
  Index features = 1;
  bool operator==(const Shape&) const = default;
};

}  // namespace fdia::nn
