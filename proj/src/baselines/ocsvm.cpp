#include "fdia/baselines/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

namespace fdia::baselines {

using nn::Index;

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::sigmoid: return "sigmoid";
    case KernelKind::rbf: return "rbf";
    case KernelKind::linear: return "linear";
  }
  return "?";
}

KernelKind parse_kernel_kind(const std::string& text) {
  for (auto k : {KernelKind::sigmoid, KernelKind::rbf, KernelKind::linear})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown kernel '" + text + "'");
}

double kernel_value(KernelKind kind, double gamma, double coef0, const double* a, const double* b,
                    std::size_t n) {
  switch (kind) {
    case KernelKind::sigmoid: {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
      return std::tanh(gamma * dot + coef0);
    }
    case KernelKind::rbf: {
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
      return std::exp(-gamma * sq);
    }
    case KernelKind::linear: {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
      return dot;
    }
  }
  return 0.0;
}

namespace {

// Least-recently-used cache of full kernel rows.
class KernelRows {
 public:
  KernelRows(const WindowMatrix& data, KernelKind kind, double gamma, double coef0,
             std::size_t cache_mb)
      : data_(data), kind_(kind), gamma_(gamma), coef0_(coef0) {
    const std::size_t row_bytes = static_cast<std::size_t>(data.rows()) * sizeof(double);
    capacity_ = std::max<std::size_t>(2, cache_mb * 1024 * 1024 / std::max<std::size_t>(1, row_bytes));
  }

  const std::vector<double>& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    const auto n = static_cast<std::size_t>(data_.rows());
    const auto width = static_cast<std::size_t>(data_.cols());
    std::vector<double> values(n);
    const double* a = data_.data() + i * width;
    for (std::size_t j = 0; j < n; ++j)
      values[j] = kernel_value(kind_, gamma_, coef0_, a, data_.data() + j * width, width);
    lru_.emplace_front(i, std::move(values));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const WindowMatrix& data_;
  KernelKind kind_;
  double gamma_, coef0_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, decltype(lru_)::iterator> index_;
};

}  // namespace

OCSVMModel fit_ocsvm(const WindowMatrix& data, const OCSVMConfig& config) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto width = static_cast<std::size_t>(data.cols());
  if (n == 0) throw std::invalid_argument("one-class SVM needs training windows");
  if (!(config.nu > 0.0 && config.nu <= 1.0)) throw std::invalid_argument("nu must be in (0,1]");
  OCSVMModel m;
  m.kernel = config.kernel;
  m.gamma = config.gamma > 0.0 ? config.gamma : 1.0 / static_cast<double>(width);
  m.coef0 = config.coef0;
  KernelRows rows(data, m.kernel, m.gamma, m.coef0, config.cache_mb);

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = data.data() + i * width;
    diag[i] = kernel_value(m.kernel, m.gamma, m.coef0, a, a, width);
  }

  // Feasible start: the first floor(nu n) multipliers at the upper bound 1.
  std::vector<double> alpha(n, 0.0);
  const double total = config.nu * static_cast<double>(n);
  const auto full = static_cast<std::size_t>(total);
  for (std::size_t i = 0; i < std::min(full, n); ++i) alpha[i] = 1.0;
  if (full < n) alpha[full] = total - static_cast<double>(full);

  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    const auto& q = rows.row(i);
    for (std::size_t t = 0; t < n; ++t) grad[t] += alpha[i] * q[t];
  }

  constexpr double tau = 1e-12;
  const std::size_t cap =
      config.max_iterations > 0 ? config.max_iterations : std::max<std::size_t>(10'000'000, 100 * n);
  std::size_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (; iter < cap; ++iter) {
    // i: most violating index that can grow; j: second-order choice among those that can shrink.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t)
      if (alpha[t] < 1.0 && -grad[t] >= gmax) {
        gmax = -grad[t];
        i = t;
      }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best = std::numeric_limits<double>::infinity();
    const std::vector<double>* qi = i < n ? &rows.row(i) : nullptr;
    for (std::size_t t = 0; t < n; ++t) {
      if (alpha[t] <= 0.0) continue;
      gmax2 = std::max(gmax2, grad[t]);
      if (qi == nullptr) continue;
      const double b = gmax + grad[t];
      if (b > 0.0) {
        double a = diag[i] + diag[t] - 2.0 * (*qi)[t];
        if (a <= 0.0) a = tau;
        const double obj = -(b * b) / a;
        if (obj <= best) {
          best = obj;
          j = t;
        }
      }
    }
    gap = gmax + gmax2;
    if (gap < config.tolerance || i == n || j == n) break;

    const std::vector<double> q_i = *qi;
    const auto& q_j = rows.row(j);
    double quad = diag[i] + diag[j] - 2.0 * q_i[j];
    if (quad <= 0.0) quad = tau;
    const double sum = alpha[i] + alpha[j];
    const double old_i = alpha[i], old_j = alpha[j];
    double next_i = alpha[i] + (grad[j] - grad[i]) / quad;
    next_i = std::clamp(next_i, std::max(0.0, sum - 1.0), std::min(1.0, sum));
    alpha[i] = next_i;
    alpha[j] = sum - next_i;
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q_i[t] * di + q_j[t] * dj;
  }
  if (iter >= cap)
    throw ConvergenceError("one-class SVM did not converge after " + std::to_string(iter) +
                           " iterations (KKT gap " + std::to_string(gap) + ", tolerance " +
                           std::to_string(config.tolerance) + ")");
  m.iterations = iter;

  // Offset: average gradient over free multipliers, else the midpoint of the feasible interval.
  double free_sum = 0.0, ub = std::numeric_limits<double>::infinity(),
         lb = -std::numeric_limits<double>::infinity();
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] >= 1.0) {
      lb = std::max(lb, grad[t]);
    } else if (alpha[t] <= 0.0) {
      ub = std::min(ub, grad[t]);
    } else {
      free_sum += grad[t];
      ++free_count;
    }
  }
  m.rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;

  std::vector<std::size_t> sv;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0) sv.push_back(t);
  m.support.resize(static_cast<Index>(sv.size()), data.cols());
  for (std::size_t k = 0; k < sv.size(); ++k) {
    m.support.row(static_cast<Index>(k)) = data.row(static_cast<Index>(sv[k]));
    m.coef.push_back(alpha[sv[k]]);
  }
  m.alpha = std::move(alpha);
  return m;
}

std::vector<double> decision_function(const OCSVMModel& model, const WindowMatrix& data) {
  if (data.cols() != model.support.cols() && model.support.rows() > 0)
    throw std::invalid_argument("window length does not match the support vectors");
  const auto width = static_cast<std::size_t>(data.cols());
  const nn::Matrix rows = data;  // column-major copy for strided access below
  std::vector<double> out(static_cast<std::size_t>(data.rows()));
  std::vector<double> x(width), s(width);
  for (Index r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < width; ++c) x[c] = rows(r, static_cast<Index>(c));
    double f = -model.rho;
    for (Index k = 0; k < model.support.rows(); ++k) {
      for (std::size_t c = 0; c < width; ++c) s[c] = model.support(k, static_cast<Index>(c));
      f += model.coef[static_cast<std::size_t>(k)] *
           kernel_value(model.kernel, model.gamma, model.coef0, s.data(), x.data(), width);
    }
    out[static_cast<std::size_t>(r)] = f;
  }
  return out;
}

}  // namespace fdia::baselines
