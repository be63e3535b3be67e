#pragma once

#include <cstdint>
#include <vector>

#include "fdia/nn/tensor.hpp"
#include "fdia/timeseries.hpp"

namespace fdia::baselines {

struct KMeansConfig {
  std::size_t clusters = 32;
  std::size_t max_iterations = 300;
  /// Stop once no centroid moves further than this (Euclidean).
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
};

struct KMeansModel {
  nn::Matrix centroids;  // clusters x window
  std::vector<std::size_t> assignment;
  /// Inertia after the seeding step, then after every Lloyd iteration.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;
};

/// Farthest-point seeding (random first centroid) followed by Lloyd's
/// algorithm. An empty cluster keeps its previous centroid.
KMeansModel fit_kmeans(const WindowMatrix& data, const KMeansConfig& config);

/// Sum of squared distances of each row to the given centroids.
double inertia(const WindowMatrix& data, const nn::Matrix& centroids,
               const std::vector<std::size_t>& assignment);

/// Euclidean distance from each row to its nearest centroid.
std::vector<double> nearest_centroid_distances(const KMeansModel& model, const WindowMatrix& data);

}  // namespace fdia::baselines
