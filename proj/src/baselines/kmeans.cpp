#include "fdia/baselines/kmeans.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fdia/rng.hpp"

namespace fdia::baselines {

using nn::Index;

namespace {

std::pair<std::size_t, double> nearest(const nn::Matrix& centroids, const WindowMatrix& data, Index row) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < centroids.rows(); ++k) {
    const double d = (centroids.row(k) - data.row(row)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(k);
    }
  }
  return {best, best_d};
}

}  // namespace

double inertia(const WindowMatrix& data, const nn::Matrix& centroids,
               const std::vector<std::size_t>& assignment) {
  double total = 0.0;
  for (Index i = 0; i < data.rows(); ++i)
    total += (centroids.row(static_cast<Index>(assignment[static_cast<std::size_t>(i)])) -
              data.row(i))
                 .squaredNorm();
  return total;
}

KMeansModel fit_kmeans(const WindowMatrix& data, const KMeansConfig& config) {
  const auto n = static_cast<std::size_t>(data.rows());
  if (config.clusters == 0) throw std::invalid_argument("k-means needs at least one cluster");
  if (config.clusters > n)
    throw std::invalid_argument("k-means: " + std::to_string(config.clusters) +
                                " clusters for " + std::to_string(n) + " windows");
  const auto k = static_cast<Index>(config.clusters);
  KMeansModel m;
  m.centroids.resize(k, data.cols());

  Rng rng(config.seed);
  std::vector<double> gap(n, std::numeric_limits<double>::infinity());
  auto add_centroid = [&](Index slot, std::size_t row) {
    m.centroids.row(slot) = data.row(static_cast<Index>(row));
    for (std::size_t i = 0; i < n; ++i)
      gap[i] = std::min(gap[i], (data.row(static_cast<Index>(i)) - m.centroids.row(slot)).squaredNorm());
  };
  add_centroid(0, rng.below(n));
  for (Index c = 1; c < k; ++c) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (gap[i] > gap[far]) far = i;
    add_centroid(c, far);
  }

  m.assignment.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) m.assignment[i] = nearest(m.centroids, data, static_cast<Index>(i)).first;
  m.inertia_history.push_back(inertia(data, m.centroids, m.assignment));

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    nn::Matrix sums = nn::Matrix::Zero(k, data.cols());
    std::vector<std::size_t> counts(config.clusters, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Index>(m.assignment[i])) += data.row(static_cast<Index>(i));
      ++counts[m.assignment[i]];
    }
    double moved = 0.0;
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      const Eigen::RowVectorXd next = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      moved = std::max(moved, (next - m.centroids.row(c)).norm());
      m.centroids.row(c) = next;
    }
    for (std::size_t i = 0; i < n; ++i) m.assignment[i] = nearest(m.centroids, data, static_cast<Index>(i)).first;
    m.inertia_history.push_back(inertia(data, m.centroids, m.assignment));
    m.iterations = it + 1;
    if (moved <= config.tolerance) break;
  }
  return m;
}

std::vector<double> nearest_centroid_distances(const KMeansModel& model, const WindowMatrix& data) {
  if (data.cols() != model.centroids.cols())
    throw std::invalid_argument("window length does not match the centroids");
  std::vector<double> out(static_cast<std::size_t>(data.rows()));
  for (Index i = 0; i < data.rows(); ++i)
    out[static_cast<std::size_t>(i)] = std::sqrt(nearest(model.centroids, data, i).second);
  return out;
}

}  // namespace fdia::baselines
