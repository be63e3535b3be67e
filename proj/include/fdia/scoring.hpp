#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fdia/aae.hpp"
#include "fdia/timeseries.hpp"

namespace fdia {

/// Anything that can reconstruct windows and, optionally, rate them with a critic.
class WindowModel {
 public:
  virtual ~WindowModel() = default;
  virtual std::size_t window_size() const = 0;
  /// Rows in, rows out (inference mode).
  virtual nn::Matrix reconstruct(const nn::Matrix& windows) const = 0;
  virtual bool has_critic() const { return false; }
  virtual std::vector<double> critic(const nn::Matrix& windows) const;
};

class AAEWindowModel : public WindowModel {
 public:
  explicit AAEWindowModel(const AAEModel& model) : model_(&model) {}
  std::size_t window_size() const override { return model_->config.window_size; }
  nn::Matrix reconstruct(const nn::Matrix& windows) const override;
  bool has_critic() const override { return true; }
  std::vector<double> critic(const nn::Matrix& windows) const override;

 private:
  const AAEModel* model_;
};

/// Returns its input unchanged; the critic, if enabled, is a constant.
class IdentityWindowModel : public WindowModel {
 public:
  explicit IdentityWindowModel(std::size_t window_size, bool with_critic = true,
                               double critic_value = 0.0)
      : n_(window_size), with_critic_(with_critic), value_(critic_value) {}
  std::size_t window_size() const override { return n_; }
  nn::Matrix reconstruct(const nn::Matrix& windows) const override { return windows; }
  bool has_critic() const override { return with_critic_; }
  std::vector<double> critic(const nn::Matrix& windows) const override;

 private:
  std::size_t n_;
  bool with_critic_;
  double value_;
};

/// DTW with |a_i - b_j| local cost, unconstrained, steps (1,0), (0,1), (1,1).
double dtw_distance(std::span<const double> a, std::span<const double> b);

/// Window rows as a column-major batch.
nn::Matrix window_rows(const WindowSet& windows);

std::vector<double> reconstruction_errors(const WindowModel& model, const WindowSet& windows);
std::vector<double> critic_scores(const WindowModel& model, const WindowSet& windows);

/// (v - mean) / std with the population std; all zeros when std == 0.
std::vector<double> zscore(std::span<const double> v);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};
/// Population mean and std over the finite entries of `v`.
Moments moments(std::span<const double> v);

/// Raw multiplies z(RE) by z(CS) as is; negated standardizes -CS so that a low
/// critic score pushes the combined score up.
enum class CriticOrientation { negated, raw };
std::string to_string(CriticOrientation o);
CriticOrientation parse_critic_orientation(const std::string& text);

struct AnomalyScores {
  std::vector<double> re;
  std::vector<double> cs;
  std::vector<double> z_re;
  std::vector<double> z_cs;
  std::vector<double> a;
  Moments re_stats;
  Moments cs_stats;

  std::size_t size() const { return a.size(); }
};

AnomalyScores anomaly_scores(std::span<const double> re, std::span<const double> cs,
                             CriticOrientation orientation = CriticOrientation::negated);
/// Reconstruction-only scoring: A = z(RE), critic fields left empty.
AnomalyScores reconstruction_scores(std::span<const double> re);

/// mean + 3 * std over the finite scores.
double threshold_three_sigma(std::span<const double> scores);
/// Per-point mean + 3 * std over the trailing `width` finite scores.
std::vector<double> rolling_three_sigma(std::span<const double> scores, std::size_t width);

/// How a point inherits a score from the windows that contain it.
enum class Aggregation { max, mean, min, center };
std::string to_string(Aggregation a);
Aggregation parse_aggregation(const std::string& text);

/// Per-point scores; points outside every window get -infinity. `center`
/// takes the window whose midpoint is nearest the point (earlier on ties).
std::vector<double> windows_to_points(std::span<const double> window_scores,
                                      std::span<const std::size_t> starts, std::size_t window_size,
                                      std::size_t series_length,
                                      Aggregation rule = Aggregation::max);

enum class ThresholdRule { population, rolling };
std::string to_string(ThresholdRule r);
ThresholdRule parse_threshold_rule(const std::string& text);

struct DetectOptions {
  std::size_t step = 1;
  Aggregation aggregation = Aggregation::max;
  CriticOrientation orientation = CriticOrientation::negated;
  ThresholdRule threshold_rule = ThresholdRule::population;
  std::size_t rolling_width = 1440;
  /// Ignore the critic even when the model has one.
  bool reconstruction_only = false;
};

struct Detection {
  std::vector<std::size_t> window_starts;
  AnomalyScores window_scores;
  std::vector<double> point_scores;
  std::vector<bool> flags;
  /// Population threshold, or the last rolling threshold.
  double threshold = 0.0;
  Aggregation aggregation = Aggregation::max;
};

/// Flags from point scores: strict `score > threshold`.
std::vector<bool> apply_threshold(std::span<const double> point_scores, double threshold);

/// `series` must already be scaled the way the model was trained.
Detection detect(const WindowModel& model, const TimeSeries& series,
                 const DetectOptions& options = {});
/// Point-level detection from already computed per-window scores.
Detection detect_from_window_scores(AnomalyScores scores, std::vector<std::size_t> starts,
                                    std::size_t window_size, std::size_t series_length,
                                    const DetectOptions& options = {});

/// `window_start,RE,CS,zRE,zCS,A`; critic columns are empty when absent.
void save_scores_csv(const Detection& detection, const std::filesystem::path& path);

}  // namespace fdia
