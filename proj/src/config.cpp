#include "fdia/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fdia {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& text) {
  T v{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

// Wraps an accessor returning a reference into the config.
template <typename Access>
auto& at(Access access, const ExperimentConfig& c) {
  return access(const_cast<ExperimentConfig&>(c));
}

template <typename Access>
Field real(std::string key, Access access) {
  return {key, [access](const ExperimentConfig& c) { return format_double(at(access, c)); },
          [access, key](ExperimentConfig& c, const std::string& v) { access(c) = parse_double(key, v); }};
}

template <typename Access>
Field count(std::string key, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<ExperimentConfig&>()))>;
  return {key, [access](const ExperimentConfig& c) { return std::to_string(at(access, c)); },
          [access, key](ExperimentConfig& c, const std::string& v) {
            access(c) = parse_unsigned<T>(key, v);
          }};
}

template <typename Access>
Field flag(std::string key, Access access) {
  return {key, [access](const ExperimentConfig& c) { return at(access, c) ? "true" : "false"; },
          [access, key](ExperimentConfig& c, const std::string& v) { access(c) = parse_bool(key, v); }};
}

template <typename Access, typename Parse>
Field choice(std::string key, Access access, Parse parse) {
  return {key, [access](const ExperimentConfig& c) { return to_string(at(access, c)); },
          [access, parse, key](ExperimentConfig& c, const std::string& v) {
            try {
              access(c) = parse(v);
            } catch (const std::invalid_argument& e) {
              throw ConfigError(key + ": " + e.what());
            }
          }};
}

template <typename Access>
Field units(std::string key, Access access) {
  return {key,
          [access](const ExperimentConfig& c) {
            std::string out;
            for (auto u : at(access, c)) out += (out.empty() ? "" : ",") + std::to_string(u);
            return out;
          },
          [access, key](ExperimentConfig& c, const std::string& v) {
            std::vector<nn::Index> out;
            for (const auto& item : split_list(v)) out.push_back(parse_unsigned<nn::Index>(key, item));
            access(c) = std::move(out);
          }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      count("run.seed", [](C& c) -> auto& { return c.seed; }),
      Field{"run.out_dir", [](const C& c) { return c.out_dir.string(); },
            [](C& c, const std::string& v) { c.out_dir = v; }},
      Field{"data.source", [](const C& c) { return c.source; },
            [](C& c, const std::string& v) {
              if (v != "synthetic" && v != "csv")
                throw ConfigError("data.source: expected synthetic or csv, got '" + v + "'");
              c.source = v;
            }},
      Field{"data.path", [](const C& c) { return c.data_path.string(); },
            [](C& c, const std::string& v) { c.data_path = v; }},
      count("data.length", [](C& c) -> auto& { return c.profile.length; }),
      real("data.base", [](C& c) -> auto& { return c.profile.base; }),
      real("data.daily_amplitude", [](C& c) -> auto& { return c.profile.daily_amplitude; }),
      real("data.weekly_amplitude", [](C& c) -> auto& { return c.profile.weekly_amplitude; }),
      real("data.noise_std", [](C& c) -> auto& { return c.profile.noise_std; }),
      count("data.seed", [](C& c) -> auto& { return c.profile.seed; }),
      real("data.train_fraction", [](C& c) -> auto& { return c.train_fraction; }),
      real("data.range_low", [](C& c) -> auto& { return c.model.range_low; }),
      real("data.range_high", [](C& c) -> auto& { return c.model.range_high; }),
      count("window.size", [](C& c) -> auto& { return c.model.window_size; }),
      count("window.step", [](C& c) -> auto& { return c.window_step; }),
      choice("attack.kind", [](C& c) -> auto& { return c.attack.kind; }, parse_attack_kind),
      real("attack.magnitude", [](C& c) -> auto& { return c.attack.magnitude; }),
      real("attack.fraction", [](C& c) -> auto& { return c.attack.fraction; }),
      count("attack.segment_count", [](C& c) -> auto& { return c.attack.segment_count; }),
      Field{"attack.segments",
            [](const C& c) {
              std::string out;
              for (const auto& s : c.attack.segments)
                out += (out.empty() ? "" : ",") + std::to_string(s.start) + ":" + std::to_string(s.length);
              return out;
            },
            [](C& c, const std::string& v) {
              std::vector<Segment> segs;
              for (const auto& item : split_list(v)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos)
                  throw ConfigError("attack.segments: expected start:length, got '" + item + "'");
                segs.push_back({parse_unsigned<std::size_t>("attack.segments", trim(item.substr(0, colon))),
                                parse_unsigned<std::size_t>("attack.segments", trim(item.substr(colon + 1)))});
              }
              c.attack.segments = std::move(segs);
            }},
      flag("attack.per_point_draw", [](C& c) -> auto& { return c.attack.per_point_draw; }),
      count("attack.seed", [](C& c) -> auto& { return c.attack.seed; }),
      count("model.latent_dim", [](C& c) -> auto& { return c.model.latent_dim; }),
      units("model.encoder_units", [](C& c) -> auto& { return c.model.encoder_units; }),
      units("model.decoder_units", [](C& c) -> auto& { return c.model.decoder_units; }),
      count("model.critic_filters", [](C& c) -> auto& { return c.model.critic_filters; }),
      count("model.critic_kernel", [](C& c) -> auto& { return c.model.critic_kernel; }),
      real("model.critic_slope", [](C& c) -> auto& { return c.model.critic_slope; }),
      real("model.dropout", [](C& c) -> auto& { return c.model.dropout; }),
      count("model.seed", [](C& c) -> auto& { return c.model_seed; }),
      count("train.epochs", [](C& c) -> auto& { return c.train.epochs; }),
      count("train.batch_size", [](C& c) -> auto& { return c.train.batch_size; }),
      count("train.critic_iterations", [](C& c) -> auto& { return c.train.critic_iterations; }),
      count("train.batches_per_epoch", [](C& c) -> auto& { return c.train.batches_per_epoch; }),
      real("train.learning_rate", [](C& c) -> auto& { return c.train.learning_rate; }),
      real("train.lr_decay", [](C& c) -> auto& { return c.train.lr_decay; }),
      real("train.gp_weight", [](C& c) -> auto& { return c.train.gp_weight; }),
      real("train.reg_weight", [](C& c) -> auto& { return c.train.reg_weight; }),
      choice("train.reconstruction", [](C& c) -> auto& { return c.train.reconstruction; },
             parse_reconstruction_term),
      choice("train.regularizer", [](C& c) -> auto& { return c.train.regularizer; }, parse_regularizer),
      flag("train.adversarial", [](C& c) -> auto& { return c.train.adversarial; }),
      real("train.gp_fd_step", [](C& c) -> auto& { return c.train.gp_fd_step; }),
      count("train.seed", [](C& c) -> auto& { return c.train.seed; }),
      choice("detect.aggregation", [](C& c) -> auto& { return c.detect.aggregation; }, parse_aggregation),
      choice("detect.critic_orientation", [](C& c) -> auto& { return c.detect.orientation; },
             parse_critic_orientation),
      choice("detect.threshold", [](C& c) -> auto& { return c.detect.threshold_rule; },
             parse_threshold_rule),
      count("detect.rolling_width", [](C& c) -> auto& { return c.detect.rolling_width; }),
      flag("detect.reconstruction_only", [](C& c) -> auto& { return c.detect.reconstruction_only; }),
      Field{"baselines.kinds",
            [](const C& c) {
              std::string out;
              for (auto k : c.baselines.kinds) out += (out.empty() ? "" : ",") + baselines::to_string(k);
              return out;
            },
            [](C& c, const std::string& v) {
              std::vector<baselines::BaselineKind> kinds;
              try {
                for (const auto& item : split_list(v)) kinds.push_back(baselines::parse_baseline_kind(item));
              } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("baselines.kinds: ") + e.what());
              }
              c.baselines.kinds = std::move(kinds);
            }},
      count("baselines.epochs", [](C& c) -> auto& { return c.baselines.epochs; }),
      count("baselines.latent_dim", [](C& c) -> auto& { return c.baselines.latent_dim; }),
      count("baselines.kmeans_k", [](C& c) -> auto& { return c.baselines.kmeans_k; }),
      count("baselines.linreg_window", [](C& c) -> auto& { return c.baselines.linreg_window; }),
      count("baselines.linreg_step", [](C& c) -> auto& { return c.baselines.linreg_step; }),
      count("baselines.linreg_horizon", [](C& c) -> auto& { return c.baselines.linreg_horizon; }),
      real("baselines.ocsvm_nu", [](C& c) -> auto& { return c.baselines.ocsvm_nu; }),
      choice("baselines.ocsvm_kernel", [](C& c) -> auto& { return c.baselines.ocsvm_kernel; },
             baselines::parse_kernel_kind),
      real("baselines.ocsvm_gamma", [](C& c) -> auto& { return c.baselines.ocsvm_gamma; }),
      real("baselines.ocsvm_coef0", [](C& c) -> auto& { return c.baselines.ocsvm_coef0; }),
      count("baselines.seed", [](C& c) -> auto& { return c.baselines.seed; }),
  };
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

ExperimentConfig::ExperimentConfig() { set_global_seed(*this, seed); }

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  for (const auto& f : fields())
    if (f.get(*this) != f.get(other)) return false;
  return true;
}

void set_global_seed(ExperimentConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.profile.seed = seed;
  c.attack.seed = seed + 1;
  c.model_seed = seed + 2;
  c.train.seed = seed + 3;
  c.baselines.seed = seed + 4;
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "run.seed") {
    set_global_seed(config, parse_unsigned<std::uint64_t>(key, value));
    return;
  }
  field(key).set(config, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.find('.') == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' has no section");
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  ExperimentConfig config;
  // The global seed goes first so explicit component seeds override it.
  for (const auto& [k, v] : entries)
    if (k == "run.seed") apply_override(config, k, v);
  for (const auto& [k, v] : entries)
    if (k != "run.seed") apply_override(config, k, v);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    const std::string s = f.key.substr(0, f.key.find('.'));
    if (s != section && !section.empty()) out += "\n";
    section = s;
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  if (c.source == "csv" && c.data_path.empty()) throw ConfigError("missing config key data.path");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
    throw ConfigError("data.train_fraction must lie in (0, 1)");
  if (c.window_step == 0) throw ConfigError("window.step must be >= 1");
  if (c.attack.segments.empty() && !(c.attack.fraction > 0.0 && c.attack.fraction < 1.0))
    throw ConfigError("attack.fraction must lie in (0, 1)");
  if (!(c.attack.magnitude > 0.0)) throw ConfigError("attack.magnitude must be positive");
  try {
    c.model.validate();
    c.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

AttackSpec attack_spec(const ExperimentConfig& c, std::size_t test_length) {
  AttackSpec spec;
  spec.kind = c.attack.kind;
  spec.magnitude = c.attack.magnitude;
  spec.per_point_draw = c.attack.per_point_draw;
  spec.draw_seed = c.attack.seed;
  if (!c.attack.segments.empty()) {
    spec.segments = c.attack.segments;
  } else {
    spec.placement =
        placement_for_fraction(test_length, c.attack.fraction, c.attack.segment_count, c.attack.seed);
  }
  return spec;
}

baselines::ComparisonSettings comparison_settings(const ExperimentConfig& c) {
  baselines::ComparisonSettings s;
  s.aae = c.model;
  s.train = c.train;
  s.train.adversarial = false;
  s.train.seed = c.baselines.seed;
  if (c.baselines.epochs > 0) s.train.epochs = c.baselines.epochs;
  s.init_seed = c.baselines.seed;
  s.latent_dim = c.baselines.latent_dim;
  s.kmeans.clusters = c.baselines.kmeans_k;
  s.kmeans.seed = c.baselines.seed;
  s.linreg = {c.baselines.linreg_window, c.baselines.linreg_step, c.baselines.linreg_horizon};
  s.ocsvm.nu = c.baselines.ocsvm_nu;
  s.ocsvm.kernel = c.baselines.ocsvm_kernel;
  s.ocsvm.gamma = c.baselines.ocsvm_gamma;
  s.ocsvm.coef0 = c.baselines.ocsvm_coef0;
  s.detect = c.detect;
  s.detect.step = c.window_step;
  s.kinds = c.baselines.kinds;
  return s;
}

}  // namespace fdia
