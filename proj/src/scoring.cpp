#include "fdia/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace fdia {

std::vector<double> WindowModel::critic(const nn::Matrix&) const {
  throw std::logic_error("model has no critic");
}

nn::Matrix AAEWindowModel::reconstruct(const nn::Matrix& windows) const {
  return fdia::reconstruct(*model_, windows);
}

std::vector<double> AAEWindowModel::critic(const nn::Matrix& windows) const {
  return critic_x_scores(*model_, windows);
}

std::vector<double> IdentityWindowModel::critic(const nn::Matrix& windows) const {
  if (!with_critic_) return WindowModel::critic(windows);
  return std::vector<double>(static_cast<std::size_t>(windows.rows()), value_);
}

double dtw_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("dtw_distance: empty sequence");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(b.size() + 1, inf);
  std::vector<double> cur(b.size() + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const double best = std::min({prev[j - 1], prev[j], cur[j - 1]});
      cur[j] = std::abs(a[i - 1] - b[j - 1]) + best;
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

nn::Matrix window_rows(const WindowSet& windows) { return nn::Matrix(windows.windows); }

std::vector<double> reconstruction_errors(const WindowModel& model, const WindowSet& windows) {
  if (windows.window_size != model.window_size())
    throw std::invalid_argument("window size does not match the model");
  if (windows.count() == 0) return {};
  const nn::Matrix rows = window_rows(windows);
  const nn::Matrix rec = model.reconstruct(rows);
  std::vector<double> re(windows.count());
  std::vector<double> a(windows.window_size), b(windows.window_size);
  for (std::size_t i = 0; i < re.size(); ++i) {
    const auto r = static_cast<nn::Index>(i);
    for (std::size_t t = 0; t < a.size(); ++t) {
      a[t] = rows(r, static_cast<nn::Index>(t));
      b[t] = rec(r, static_cast<nn::Index>(t));
    }
    re[i] = dtw_distance(a, b);
  }
  return re;
}

std::vector<double> critic_scores(const WindowModel& model, const WindowSet& windows) {
  if (windows.window_size != model.window_size())
    throw std::invalid_argument("window size does not match the model");
  if (windows.count() == 0) return {};
  return model.critic(window_rows(windows));
}

Moments moments(std::span<const double> v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      sum += x;
      ++n;
    }
  if (n == 0) return {};
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double x : v)
    if (std::isfinite(x)) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(n))};
}

std::vector<double> zscore(std::span<const double> v) {
  const Moments m = moments(v);
  std::vector<double> z(v.size(), 0.0);
  if (m.stddev == 0.0) return z;
  for (std::size_t i = 0; i < v.size(); ++i) z[i] = (v[i] - m.mean) / m.stddev;
  return z;
}

std::string to_string(CriticOrientation o) {
  return o == CriticOrientation::negated ? "negated" : "raw";
}

CriticOrientation parse_critic_orientation(const std::string& text) {
  if (text == "negated") return CriticOrientation::negated;
  if (text == "raw") return CriticOrientation::raw;
  throw std::invalid_argument("unknown critic orientation '" + text + "'");
}

AnomalyScores anomaly_scores(std::span<const double> re, std::span<const double> cs,
                             CriticOrientation orientation) {
  if (re.size() != cs.size())
    throw std::invalid_argument("RE and CS vectors differ in length");
  AnomalyScores s;
  s.re.assign(re.begin(), re.end());
  s.cs.assign(cs.begin(), cs.end());
  s.re_stats = moments(re);
  s.cs_stats = moments(cs);
  s.z_re = zscore(re);
  if (orientation == CriticOrientation::negated) {
    std::vector<double> neg(cs.size());
    std::transform(cs.begin(), cs.end(), neg.begin(), [](double x) { return -x; });
    s.z_cs = zscore(neg);
  } else {
    s.z_cs = zscore(cs);
  }
  s.a.resize(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) s.a[i] = s.z_re[i] * s.z_cs[i];
  return s;
}

AnomalyScores reconstruction_scores(std::span<const double> re) {
  AnomalyScores s;
  s.re.assign(re.begin(), re.end());
  s.re_stats = moments(re);
  s.z_re = zscore(re);
  s.a = s.z_re;
  return s;
}

double threshold_three_sigma(std::span<const double> scores) {
  const Moments m = moments(scores);
  return m.mean + 3.0 * m.stddev;
}

std::vector<double> rolling_three_sigma(std::span<const double> scores, std::size_t width) {
  if (width == 0) throw std::invalid_argument("rolling width must be >= 1");
  std::vector<double> out(scores.size());
  std::deque<double> win;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isfinite(scores[i])) {
      win.push_back(scores[i]);
      if (win.size() > width) win.pop_front();
    }
    if (win.empty()) {
      out[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    // Two passes per point; running sums of squares cancel badly.
    const auto n = static_cast<double>(win.size());
    double mean = 0.0;
    for (double x : win) mean += x;
    mean /= n;
    double sq = 0.0;
    for (double x : win) sq += (x - mean) * (x - mean);
    out[i] = mean + 3.0 * std::sqrt(sq / n);
  }
  return out;
}

std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::max: return "max";
    case Aggregation::mean: return "mean";
    case Aggregation::min: return "min";
    case Aggregation::center: return "center";
  }
  return "?";
}

Aggregation parse_aggregation(const std::string& text) {
  if (text == "max") return Aggregation::max;
  if (text == "mean") return Aggregation::mean;
  if (text == "min") return Aggregation::min;
  if (text == "center") return Aggregation::center;
  throw std::invalid_argument("unknown aggregation '" + text + "'");
}

std::vector<double> windows_to_points(std::span<const double> window_scores,
                                      std::span<const std::size_t> starts, std::size_t window_size,
                                      std::size_t series_length, Aggregation rule) {
  if (window_scores.size() != starts.size())
    throw std::invalid_argument("one start per window score is required");
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> out(series_length, ninf);
  std::vector<std::size_t> count(series_length, 0);
  std::vector<double> best_gap(series_length, std::numeric_limits<double>::infinity());
  const double half = (static_cast<double>(window_size) - 1.0) / 2.0;
  for (std::size_t w = 0; w < starts.size(); ++w) {
    const std::size_t end = std::min(series_length, starts[w] + window_size);
    for (std::size_t p = starts[w]; p < end; ++p) {
      const double s = window_scores[w];
      switch (rule) {
        case Aggregation::max:
          out[p] = count[p] == 0 ? s : std::max(out[p], s);
          break;
        case Aggregation::min:
          out[p] = count[p] == 0 ? s : std::min(out[p], s);
          break;
        case Aggregation::mean:
          out[p] = count[p] == 0 ? s : out[p] + s;
          break;
        case Aggregation::center: {
          const double gap =
              std::abs(static_cast<double>(starts[w]) + half - static_cast<double>(p));
          if (gap < best_gap[p]) {
            best_gap[p] = gap;
            out[p] = s;
          }
          break;
        }
      }
      ++count[p];
    }
  }
  if (rule == Aggregation::mean)
    for (std::size_t p = 0; p < series_length; ++p)
      if (count[p] > 0) out[p] /= static_cast<double>(count[p]);
  return out;
}

std::string to_string(ThresholdRule r) {
  return r == ThresholdRule::population ? "population" : "rolling";
}

ThresholdRule parse_threshold_rule(const std::string& text) {
  if (text == "population") return ThresholdRule::population;
  if (text == "rolling") return ThresholdRule::rolling;
  throw std::invalid_argument("unknown threshold rule '" + text + "'");
}

std::vector<bool> apply_threshold(std::span<const double> point_scores, double threshold) {
  std::vector<bool> flags(point_scores.size());
  for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = point_scores[i] > threshold;
  return flags;
}

Detection detect_from_window_scores(AnomalyScores scores, std::vector<std::size_t> starts,
                                    std::size_t window_size, std::size_t series_length,
                                    const DetectOptions& options) {
  Detection d;
  d.aggregation = options.aggregation;
  d.point_scores =
      windows_to_points(scores.a, starts, window_size, series_length, options.aggregation);
  if (options.threshold_rule == ThresholdRule::population) {
    d.threshold = threshold_three_sigma(d.point_scores);
    d.flags = apply_threshold(d.point_scores, d.threshold);
  } else {
    const auto local = rolling_three_sigma(d.point_scores, options.rolling_width);
    d.flags.resize(series_length);
    for (std::size_t i = 0; i < series_length; ++i) d.flags[i] = d.point_scores[i] > local[i];
    d.threshold = local.empty() ? 0.0 : local.back();
  }
  d.window_scores = std::move(scores);
  d.window_starts = std::move(starts);
  return d;
}

Detection detect(const WindowModel& model, const TimeSeries& series, const DetectOptions& options) {
  const std::size_t n = model.window_size();
  if (series.size() < n)
    throw std::invalid_argument("series of length " + std::to_string(series.size()) +
                                " is shorter than the window (" + std::to_string(n) + ")");
  const WindowSet windows = make_windows(series, n, options.step);
  const auto re = reconstruction_errors(model, windows);
  AnomalyScores scores;
  if (model.has_critic() && !options.reconstruction_only) {
    scores = anomaly_scores(re, critic_scores(model, windows), options.orientation);
  } else {
    scores = reconstruction_scores(re);
  }
  return detect_from_window_scores(std::move(scores), windows.starts, n, series.size(), options);
}

void save_scores_csv(const Detection& detection, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.precision(17);
  const auto& s = detection.window_scores;
  const bool critic = !s.cs.empty();
  out << "window_start,RE,CS,zRE,zCS,A\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << detection.window_starts[i] << ',' << s.re[i] << ',';
    if (critic) out << s.cs[i];
    out << ',' << s.z_re[i] << ',';
    if (critic) out << s.z_cs[i];
    out << ',' << s.a[i] << '\n';
  }
}

}  // namespace fdia
