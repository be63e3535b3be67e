#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fdia {

/// How timestamps were written in the source file.
enum class TimestampFormat { index, iso8601 };

/// Uniformly sampled univariate measurement series.
///
/// Timestamps are integer sample indices or, for ISO-8601 input, seconds since
/// the Unix epoch (UTC). Spacing is constant and strictly positive.
struct TimeSeries {
  std::vector<std::int64_t> timestamps;
  std::vector<double> values;
  std::string channel;
  std::string unit;
  std::int64_t sample_interval = 1;
  TimestampFormat format = TimestampFormat::index;

  std::size_t size() const { return values.size(); }

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  /// Same timestamps and metadata, new values.
  TimeSeries with_values(std::vector<double> new_values) const;
  /// Contiguous sub-range [first, first + count).
  TimeSeries slice(std::size_t first, std::size_t count) const;
};

/// Index series 0..n-1 with unit spacing.
TimeSeries make_series(std::vector<double> values, std::string channel = "value");

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::int64_t parse_timestamp(const std::string& text, TimestampFormat* format);
std::string format_timestamp(std::int64_t ts, TimestampFormat format);

/// Reads a `timestamp,value` CSV. Rejects non-finite values and irregular or
/// non-increasing timestamps.
TimeSeries load_csv(const std::filesystem::path& path);
void save_csv(const TimeSeries& series, const std::filesystem::path& path);

/// Per-point 0/1 labels stored as `timestamp,label`.
void save_labels_csv(const TimeSeries& series, const std::vector<bool>& labels,
                     const std::filesystem::path& path);
std::vector<bool> load_labels_csv(const std::filesystem::path& path);

struct ProfileParams {
  std::size_t length = 10080;
  double base = 1.0;
  double daily_amplitude = 0.2;
  /// Relative amplitude of the slow weekly modulation.
  double weekly_amplitude = 0.1;
  double noise_std = 0.01;
  std::uint64_t seed = 7;
};

/// One-minute-cadence load-like profile: daily sinusoid, weekly modulation
/// and Gaussian noise. Deterministic for a fixed seed.
TimeSeries synthesize_profile(const ProfileParams& params);

/// Min-max scaling parameters mapping [x_min, x_max] onto [low, high].
struct NormalizationParams {
  double x_min = 0.0;
  double x_max = 1.0;
  double low = -1.0;
  double high = 1.0;

  void validate() const;
  double apply(double x) const;
  double invert(double y) const;
};

NormalizationParams fit_normalizer(const TimeSeries& series, double low = -1.0,
                                   double high = 1.0);
TimeSeries normalize(const TimeSeries& series, const NormalizationParams& params);
TimeSeries denormalize(const TimeSeries& series, const NormalizationParams& params);

/// Chronological split: the first floor(m * fraction) samples train.
std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, double train_fraction);

using WindowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Overlapping fixed-length windows. Row i holds source[starts[i] .. starts[i] + window_size).
struct WindowSet {
  WindowMatrix windows;
  std::vector<std::size_t> starts;
  std::size_t window_size = 0;
  std::size_t step_size = 0;
  std::size_t source_length = 0;

  std::size_t count() const { return starts.size(); }
  std::span<const double> row(std::size_t i) const {
    return {windows.data() + i * window_size, window_size};
  }
};

/// n = floor((m - window) / step) windows starting at 0, step, 2*step, ...
/// Trailing samples beyond the last window are left uncovered.
std::size_t window_count(std::size_t length, std::size_t window, std::size_t step);
WindowSet make_windows(std::span<const double> values, std::size_t window, std::size_t step);
inline WindowSet make_windows(const TimeSeries& series, std::size_t window, std::size_t step) {
  return make_windows(series.values, window, step);
}

}  // namespace fdia
