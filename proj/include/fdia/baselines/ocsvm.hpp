#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fdia/nn/tensor.hpp"
#include "fdia/timeseries.hpp"

namespace fdia::baselines {

enum class KernelKind { sigmoid, rbf, linear };
std::string to_string(KernelKind k);
KernelKind parse_kernel_kind(const std::string& text);

struct OCSVMConfig {
  double nu = 0.05;
  KernelKind kernel = KernelKind::sigmoid;
  /// <= 0 means 1 / window length.
  double gamma = 0.0;
  double coef0 = 0.0;
  /// Stopping tolerance on the maximal KKT violation.
  double tolerance = 1e-3;
  /// 0 means max(10^7, 100 * n).
  std::size_t max_iterations = 0;
  std::size_t cache_mb = 200;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decision f(x) = sum_i coef_i k(sv_i, x) - rho; f >= 0 inside the support.
struct OCSVMModel {
  KernelKind kernel = KernelKind::sigmoid;
  double gamma = 0.0;
  double coef0 = 0.0;
  nn::Matrix support;  // support vectors as rows
  std::vector<double> coef;
  double rho = 0.0;
  std::size_t iterations = 0;
  /// Multipliers for every training row, scaled to [0, 1], summing to nu * n.
  std::vector<double> alpha;
};

double kernel_value(KernelKind kind, double gamma, double coef0, const double* a, const double* b,
                    std::size_t n);

/// Schölkopf's nu one-class SVM, dual solved by SMO with second-order
/// working-set selection. Throws ConvergenceError when the cap is hit.
OCSVMModel fit_ocsvm(const WindowMatrix& data, const OCSVMConfig& config = {});

std::vector<double> decision_function(const OCSVMModel& model, const WindowMatrix& data);

}  // namespace fdia::baselines
