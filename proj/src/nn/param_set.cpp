#include "fdia/nn/param_set.hpp"

#include <stdexcept>

namespace fdia::nn {

std::size_t ParamSet::add(std::string name, Index rows, Index cols) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("parameter '" + name + "' has empty shape");
  const Index offset = flat_.size();
  entries_.push_back({std::move(name), rows, cols, offset});
  flat_.conservativeResize(offset + rows * cols);
  flat_.segment(offset, rows * cols).setZero();
  return entries_.size() - 1;
}

Eigen::Map<Matrix> ParamSet::matrix(std::size_t entry) {
  const auto& e = entries_.at(entry);
  return {flat_.data() + e.offset, e.rows, e.cols};
}

Eigen::Map<const Matrix> ParamSet::matrix(std::size_t entry) const {
  const auto& e = entries_.at(entry);
  return {flat_.data() + e.offset, e.rows, e.cols};
}

void ParamSet::assign(const Vector& values) {
  if (values.size() != flat_.size())
    throw std::invalid_argument("parameter vector length " + std::to_string(values.size()) +
                                " does not match " + std::to_string(flat_.size()));
  flat_ = values;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out = *this;
  out.flat_.setZero();
  return out;
}

}  // namespace fdia::nn
