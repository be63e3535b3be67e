#pragma once

#include <string>
#include <vector>

#include "fdia/nn/tensor.hpp"

namespace fdia::nn {

/// Named parameter tensors backed by one flat vector.
///
/// Entries are laid out back to back in registration order, so the flat view
/// is the serialization format and the vector Adam and finite-difference
/// checks operate on. Shapes are fixed once registered.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Index rows = 0;
    Index cols = 0;
    Index offset = 0;
    Index size() const { return rows * cols; }
  };

  /// Registers a rows x cols tensor and returns its entry index.
  std::size_t add(std::string name, Index rows, Index cols);

  Eigen::Map<Matrix> matrix(std::size_t entry);
  Eigen::Map<const Matrix> matrix(std::size_t entry) const;

  const std::vector<Entry>& entries() const { return entries_; }
  Index size() const { return flat_.size(); }

  Vector& flat() { return flat_; }
  const Vector& flat() const { return flat_; }
  /// Replaces every value; the length must match.
  void assign(const Vector& values);

  /// Same layout, all zeros.
  ParamSet zeros_like() const;
  void set_zero() { flat_.setZero(); }

  /// Sum of squares (ridge penalty) and sum of magnitudes (lasso penalty).
  double squared_norm() const { return flat_.squaredNorm(); }
  double abs_sum() const { return flat_.lpNorm<1>(); }

 private:
  std::vector<Entry> entries_;
  Vector flat_;
};

}  // namespace fdia::nn
