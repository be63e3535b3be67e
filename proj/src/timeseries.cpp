#include "fdia/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fdia/rng.hpp"

namespace fdia {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string row_tag(std::size_t line) {
  // Data rows start on line 2, after the header.
  return "row " + std::to_string(line - 1) + " (line " + std::to_string(line) + ")";
}

bool parse_int(const std::string& s, std::int64_t* out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

bool parse_two_digits(std::string_view s, std::size_t pos, int* out) {
  if (pos + 2 > s.size()) return false;
  if (!std::isdigit(static_cast<unsigned char>(s[pos])) ||
      !std::isdigit(static_cast<unsigned char>(s[pos + 1])))
    return false;
  *out = (s[pos] - '0') * 10 + (s[pos + 1] - '0');
  return true;
}

std::pair<std::string, std::string> split_pair(const std::string& line, std::size_t line_no) {
  const auto comma = line.find(',');
  if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
    throw ParseError(row_tag(line_no) + ": expected exactly two comma-separated fields",
                     line_no);
  }
  return {trim(std::string_view(line).substr(0, comma)),
          trim(std::string_view(line).substr(comma + 1))};
}

void check_header(std::istream& in, const std::string& expected) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty file: missing header", 1);
  std::string cleaned;
  for (char c : header)
    if (c != ' ' && c != '\t' && c != '\r') cleaned.push_back(c);
  if (cleaned.size() >= 3 && static_cast<unsigned char>(cleaned[0]) == 0xEF) cleaned.erase(0, 3);
  if (cleaned != expected)
    throw ParseError("line 1: expected header '" + expected + "', got '" + trim(header) + "'", 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

std::string format_value(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void TimeSeries::validate() const {
  if (values.empty()) throw std::invalid_argument("time series must hold at least one sample");
  if (timestamps.size() != values.size())
    throw std::invalid_argument("timestamps and values differ in length");
  if (sample_interval <= 0) throw std::invalid_argument("sample interval must be positive");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw std::invalid_argument("non-finite value at index " + std::to_string(i));
    if (i > 0 && timestamps[i] - timestamps[i - 1] != sample_interval)
      throw std::invalid_argument("irregular timestamp spacing at index " + std::to_string(i));
  }
}

TimeSeries TimeSeries::with_values(std::vector<double> new_values) const {
  if (new_values.size() != values.size())
    throw std::invalid_argument("replacement values differ in length");
  TimeSeries out = *this;
  out.values = std::move(new_values);
  return out;
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw std::out_of_range("slice exceeds series length");
  TimeSeries out;
  out.channel = channel;
  out.unit = unit;
  out.sample_interval = sample_interval;
  out.format = format;
  out.timestamps.assign(timestamps.begin() + first, timestamps.begin() + first + count);
  out.values.assign(values.begin() + first, values.begin() + first + count);
  return out;
}

TimeSeries make_series(std::vector<double> values, std::string channel) {
  TimeSeries s;
  s.timestamps.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) s.timestamps[i] = static_cast<std::int64_t>(i);
  s.values = std::move(values);
  s.channel = std::move(channel);
  return s;
}

// Accepts YYYY-MM-DDTHH:MM[:SS][Z] (a space may replace the T). Returns seconds
// since the Unix epoch, UTC.
std::int64_t parse_timestamp(const std::string& text, TimestampFormat* format) {
  std::int64_t index = 0;
  if (parse_int(text, &index)) {
    if (format) *format = TimestampFormat::index;
    return index;
  }
  std::string_view s(text);
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
  if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':')
    throw std::invalid_argument("unrecognised timestamp '" + text + "'");
  std::int64_t year = 0;
  if (!parse_int(std::string(s.substr(0, 4)), &year))
    throw std::invalid_argument("unrecognised timestamp '" + text + "'");
  int month = 0, day = 0, hour = 0, minute = 0, second = 0;
  bool ok = parse_two_digits(s, 5, &month) && parse_two_digits(s, 8, &day) &&
            parse_two_digits(s, 11, &hour) && parse_two_digits(s, 14, &minute);
  if (ok && s.size() > 16) ok = s.size() == 19 && s[16] == ':' && parse_two_digits(s, 17, &second);
  const std::chrono::year_month_day ymd{std::chrono::year(static_cast<int>(year)),
                                        std::chrono::month(static_cast<unsigned>(month)),
                                        std::chrono::day(static_cast<unsigned>(day))};
  if (!ok || !ymd.ok() || hour > 23 || minute > 59 || second > 59)
    throw std::invalid_argument("unrecognised timestamp '" + text + "'");
  if (format) *format = TimestampFormat::iso8601;
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(std::int64_t ts, TimestampFormat format) {
  if (format == TimestampFormat::index) return std::to_string(ts);
  std::int64_t days = ts / 86400;
  std::int64_t secs = ts % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days(std::chrono::days(static_cast<int>(days)))};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

TimeSeries load_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  check_header(in, "timestamp,value");

  TimeSeries series;
  series.channel = path.stem().string();
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto [ts_text, value_text] = split_pair(line, line_no);

    TimestampFormat fmt{};
    std::int64_t ts = 0;
    try {
      ts = parse_timestamp(ts_text, &fmt);
    } catch (const std::invalid_argument& e) {
      throw ParseError(row_tag(line_no) + ": " + e.what(), line_no);
    }
    if (series.values.empty()) {
      series.format = fmt;
    } else if (fmt != series.format) {
      throw ParseError(row_tag(line_no) + ": mixed timestamp formats", line_no);
    }

    double value = 0.0;
    const char* end = value_text.data() + value_text.size();
    auto [ptr, ec] = std::from_chars(value_text.data(), end, value);
    if (ec != std::errc() || ptr != end)
      throw ParseError(row_tag(line_no) + ": malformed value '" + value_text + "'", line_no);
    if (!std::isfinite(value))
      throw ParseError(row_tag(line_no) + ": non-finite value '" + value_text + "'", line_no);

    if (!series.timestamps.empty()) {
      const std::int64_t delta = ts - series.timestamps.back();
      if (delta <= 0)
        throw ParseError(row_tag(line_no) + ": timestamps must be strictly increasing", line_no);
      if (series.timestamps.size() == 1) {
        series.sample_interval = delta;
      } else if (delta != series.sample_interval) {
        throw ParseError(row_tag(line_no) + ": irregular timestamp spacing", line_no);
      }
    }
    series.timestamps.push_back(ts);
    series.values.push_back(value);
  }
  if (series.values.empty()) throw ParseError("file holds no data rows", line_no);
  return series;
}

void save_csv(const TimeSeries& series, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "timestamp,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_timestamp(series.timestamps[i], series.format) << ','
        << format_value(series.values[i]) << '\n';
}

void save_labels_csv(const TimeSeries& series, const std::vector<bool>& labels,
                     const std::filesystem::path& path) {
  if (labels.size() != series.size())
    throw std::invalid_argument("label count differs from series length");
  auto out = open_output(path);
  out << "timestamp,label\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_timestamp(series.timestamps[i], series.format) << ',' << (labels[i] ? 1 : 0)
        << '\n';
}

std::vector<bool> load_labels_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  check_header(in, "timestamp,label");
  std::vector<bool> labels;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto [ts_text, label_text] = split_pair(line, line_no);
    if (label_text == "0") {
      labels.push_back(false);
    } else if (label_text == "1") {
      labels.push_back(true);
    } else {
      throw ParseError(row_tag(line_no) + ": label must be 0 or 1", line_no);
    }
  }
  return labels;
}

TimeSeries synthesize_profile(const ProfileParams& p) {
  if (p.length == 0) throw std::invalid_argument("profile length must be positive");
  if (p.noise_std < 0.0) throw std::invalid_argument("noise_std must be non-negative");
  constexpr double kDay = 1440.0;
  constexpr double kWeek = 10080.0;
  Rng rng(p.seed);
  std::vector<double> values(p.length);
  for (std::size_t t = 0; t < p.length; ++t) {
    const double tt = static_cast<double>(t);
    const double weekly = 1.0 + p.weekly_amplitude * std::sin(2.0 * std::numbers::pi * tt / kWeek);
    const double daily = p.daily_amplitude * weekly * std::sin(2.0 * std::numbers::pi * tt / kDay);
    const double noise = p.noise_std > 0.0 ? p.noise_std * rng.normal() : 0.0;
    values[t] = p.base + daily + noise;
  }
  TimeSeries s = make_series(std::move(values), "synthetic");
  s.unit = "pu";
  return s;
}

void NormalizationParams::validate() const {
  if (!(x_max > x_min)) throw std::invalid_argument("normalization requires x_max > x_min");
  if (!(high > low)) throw std::invalid_argument("normalization requires high > low");
}

double NormalizationParams::apply(double x) const {
  return low + (x - x_min) / (x_max - x_min) * (high - low);
}

double NormalizationParams::invert(double y) const {
  return x_min + (y - low) / (high - low) * (x_max - x_min);
}

NormalizationParams fit_normalizer(const TimeSeries& series, double low, double high) {
  if (series.values.empty()) throw std::invalid_argument("cannot fit normalizer on empty series");
  const auto [lo, hi] = std::minmax_element(series.values.begin(), series.values.end());
  NormalizationParams p{*lo, *hi, low, high};
  if (!(p.x_max > p.x_min))
    throw std::invalid_argument("degenerate range: series is constant");
  p.validate();
  return p;
}

TimeSeries normalize(const TimeSeries& series, const NormalizationParams& params) {
  params.validate();
  std::vector<double> out(series.size());
  std::transform(series.values.begin(), series.values.end(), out.begin(),
                 [&](double x) { return params.apply(x); });
  return series.with_values(std::move(out));
}

TimeSeries denormalize(const TimeSeries& series, const NormalizationParams& params) {
  params.validate();
  std::vector<double> out(series.size());
  std::transform(series.values.begin(), series.values.end(), out.begin(),
                 [&](double y) { return params.invert(y); });
  return series.with_values(std::move(out));
}

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  const auto n_train =
      static_cast<std::size_t>(std::floor(static_cast<double>(series.size()) * train_fraction));
  return {series.slice(0, n_train), series.slice(n_train, series.size() - n_train)};
}

std::size_t window_count(std::size_t length, std::size_t window, std::size_t step) {
  if (window == 0 || step == 0) throw std::invalid_argument("window and step must be >= 1");
  if (window > length) throw std::invalid_argument("window longer than series");
  return (length - window) / step;
}

WindowSet make_windows(std::span<const double> values, std::size_t window, std::size_t step) {
  const std::size_t n = window_count(values.size(), window, step);
  WindowSet ws;
  ws.window_size = window;
  ws.step_size = step;
  ws.source_length = values.size();
  ws.windows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(window));
  ws.starts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ws.starts[i] = i * step;
    for (std::size_t j = 0; j < window; ++j)
      ws.windows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * step + j];
  }
  return ws;
}

}  // namespace fdia
