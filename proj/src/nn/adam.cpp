#include "fdia/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace fdia::nn {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("decay must lie in (0, 1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
}

Adam::Adam(AdamConfig config, Index param_count)
    : config_(config), m_(Vector::Zero(param_count)), v_(Vector::Zero(param_count)) {
  config_.validate();
}

double Adam::effective_rate() const {
  return config_.learning_rate * std::pow(config_.decay, static_cast<double>(epoch_));
}

void Adam::step(ParamSet& params, const ParamSet& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("Adam state, parameters and gradients differ in size");
  ++steps_;
  const Vector& g = grads.flat();
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * g;
  v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * g.cwiseAbs2();
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  const double rate = effective_rate();
  params.flat().array() -=
      rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + config_.epsilon);
}

}  // namespace fdia::nn
