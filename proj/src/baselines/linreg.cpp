#include "fdia/baselines/linreg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fdia::baselines {

using nn::Index;

LinRegData linreg_data(std::span<const double> series, const LinRegConfig& c) {
  if (c.horizon == 0 || c.horizon >= c.window || c.step == 0)
    throw std::invalid_argument("linreg needs 0 < horizon < window and step >= 1");
  const std::size_t lags = c.window - c.horizon;
  LinRegData d;
  for (std::size_t s = 0; s + c.window <= series.size(); s += c.step) d.starts.push_back(s);
  const auto rows = static_cast<Index>(d.starts.size());
  d.features.resize(rows, static_cast<Index>(lags + 1));
  d.targets.resize(rows, static_cast<Index>(c.horizon));
  for (Index r = 0; r < rows; ++r) {
    const std::size_t s = d.starts[static_cast<std::size_t>(r)];
    for (std::size_t j = 0; j < lags; ++j) d.features(r, static_cast<Index>(j)) = series[s + j];
    d.features(r, static_cast<Index>(lags)) = 1.0;
    for (std::size_t j = 0; j < c.horizon; ++j)
      d.targets(r, static_cast<Index>(j)) = series[s + lags + j];
  }
  return d;
}

LinRegModel fit_linreg(std::span<const double> series, const LinRegConfig& config) {
  const LinRegData d = linreg_data(series, config);
  if (d.starts.empty())
    throw std::invalid_argument("linreg: series of length " + std::to_string(series.size()) +
                                " holds no " + std::to_string(config.window) + "-sample window");
  LinRegModel m;
  m.config = config;
  const nn::Matrix gram = d.features.transpose() * d.features;
  const nn::Matrix rhs = d.features.transpose() * d.targets;
  Eigen::LLT<nn::Matrix> llt(gram);
  if (llt.info() == Eigen::Success) {
    m.weights = llt.solve(rhs);
    // Accept the Cholesky solve only if it actually satisfies the normal equations.
    const double resid = (gram * m.weights - rhs).norm();
    if (std::isfinite(resid) && resid <= 1e-8 * std::max(1.0, rhs.norm())) return m;
  }
  m.rank_deficient = true;
  m.weights = d.features.completeOrthogonalDecomposition().solve(d.targets);
  return m;
}

nn::Matrix predict(const LinRegModel& model, const nn::Matrix& features) {
  if (features.cols() != model.weights.rows())
    throw std::invalid_argument("linreg: feature width does not match the model");
  return features * model.weights;
}

std::vector<double> linreg_point_residuals(const LinRegModel& model, std::span<const double> series) {
  std::vector<double> out(series.size(), -std::numeric_limits<double>::infinity());
  const LinRegData d = linreg_data(series, model.config);
  if (d.starts.empty()) return out;
  const nn::Matrix pred = predict(model, d.features);
  const std::size_t lags = model.config.window - model.config.horizon;
  for (std::size_t r = 0; r < d.starts.size(); ++r)
    for (std::size_t j = 0; j < model.config.horizon; ++j) {
      const auto ri = static_cast<Index>(r);
      const auto ji = static_cast<Index>(j);
      out[d.starts[r] + lags + j] = std::abs(pred(ri, ji) - d.targets(ri, ji));
    }
  return out;
}

}  // namespace fdia::baselines
