#pragma once

#include <span>
#include <vector>

#include "fdia/nn/tensor.hpp"

namespace fdia::baselines {

/// Each `window`-long slice (taken every `step` samples) splits into
/// `window - horizon` lag values followed by `horizon` targets.
struct LinRegConfig {
  std::size_t window = 72;
  std::size_t step = 36;
  std::size_t horizon = 36;
};

/// Multi-output least-squares forecaster with an intercept.
struct LinRegModel {
  LinRegConfig config;
  nn::Matrix weights;  // (lags + 1) x horizon, intercept in the last row
  bool rank_deficient = false;
};

/// Design matrix (lags plus a trailing column of ones) and targets.
struct LinRegData {
  nn::Matrix features;
  nn::Matrix targets;
  std::vector<std::size_t> starts;
};
LinRegData linreg_data(std::span<const double> series, const LinRegConfig& config);

/// Normal equations via Cholesky; falls back to a complete orthogonal
/// decomposition (minimum-norm solution) when the Gram matrix is singular.
LinRegModel fit_linreg(std::span<const double> series, const LinRegConfig& config = {});

nn::Matrix predict(const LinRegModel& model, const nn::Matrix& features);

/// |forecast - actual| per forecast point; points never forecast are -inf.
std::vector<double> linreg_point_residuals(const LinRegModel& model, std::span<const double> series);

}  // namespace fdia::baselines
