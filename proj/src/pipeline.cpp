#include "fdia/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fdia/metrics.hpp"
#include "fdia/model_io.hpp"
#include "fdia/svg_plot.hpp"

namespace fdia {

namespace fs = std::filesystem;
using nlohmann::json;

CsvTable read_numeric_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact(path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (cell.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(cell, &used));
          if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                   ": not a number: '" + cell + "'");
        }
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (row.size() != t.header.size())
      throw std::runtime_error(path.string() + " line " + std::to_string(line_no) + ": expected " +
                               std::to_string(t.header.size()) + " columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) {
      std::vector<double> out;
      out.reserve(rows.size());
      for (const auto& r : rows) out.push_back(r[c]);
      return out;
    }
  throw std::runtime_error("CSV has no column '" + name + "'");
}

namespace {

fs::path out_path(const ExperimentConfig& c, const char* name) { return c.out_dir / name; }

fs::path require(const ExperimentConfig& c, const char* name) {
  fs::path p = out_path(c, name);
  if (!fs::exists(p)) throw MissingArtifact(p);
  return p;
}

void note(std::ostream* log, const std::string& msg) {
  if (log != nullptr) *log << msg << '\n' << std::flush;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

AAEModel load_trained(const ExperimentConfig& c) {
  AAEModel m = load_model(require(c, artifact::model));
  if (!m.normalization) throw ModelFormatError("model file carries no normalization parameters");
  return m;
}

DetectOptions detect_options(const ExperimentConfig& c) {
  DetectOptions o = c.detect;
  o.step = c.window_step;
  return o;
}

json metric_json(const MetricRow& r) {
  return {{"tp", r.counts.tp},           {"fp", r.counts.fp},
          {"tn", r.counts.tn},           {"fn", r.counts.fn},
          {"accuracy", r.accuracy},      {"precision", r.precision},
          {"recall", r.recall},          {"f1", r.f1},
          {"precision_degenerate", precision(r.counts).degenerate},
          {"recall_degenerate", recall(r.counts).degenerate}};
}

}  // namespace

Paths cmd_generate(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  TimeSeries s;
  if (c.source == "synthetic") {
    s = synthesize_profile(c.profile);
  } else {
    if (!fs::exists(c.data_path)) throw MissingArtifact(c.data_path);
    s = load_csv(c.data_path);
  }
  const fs::path p = out_path(c, artifact::series);
  save_csv(s, p);
  write_text(out_path(c, artifact::config), serialize_config(c));
  note(log, "series: " + std::to_string(s.size()) + " samples");
  return {p, out_path(c, artifact::config)};
}

Paths cmd_attack(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  const TimeSeries s = load_csv(require(c, artifact::series));
  auto [train, test] = split(s, c.train_fraction);
  const AttackedSeries att = inject(test, attack_spec(c, test.size()));
  Paths out{out_path(c, artifact::train), out_path(c, artifact::test_clean),
            out_path(c, artifact::test), out_path(c, artifact::labels)};
  save_csv(train, out[0]);
  save_csv(test, out[1]);
  save_csv(att.series, out[2]);
  save_labels_csv(att.series, att.labels, out[3]);
  std::size_t attacked = 0;
  for (bool b : att.labels) attacked += b;
  note(log, "train " + std::to_string(train.size()) + ", test " + std::to_string(test.size()) +
                ", attacked points " + std::to_string(attacked) + " in " +
                std::to_string(att.segments.size()) + " segments (" + to_string(c.attack.kind) + ")");
  return out;
}

Paths cmd_train(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  const TimeSeries train = load_csv(require(c, artifact::train));
  const NormalizationParams norm = fit_normalizer(train, c.model.range_low, c.model.range_high);
  const WindowSet windows = make_windows(normalize(train, norm), c.model.window_size, c.window_step);
  const std::size_t every = std::max<std::size_t>(1, c.train.epochs / 20);
  auto [model, report] =
      fdia::train(build_model(c.model, c.model_seed), windows, c.train, [&](const EpochRecord& r) {
        if (r.epoch % every == 0 || r.epoch == 1)
          note(log, "epoch " + std::to_string(r.epoch) + "/" + std::to_string(c.train.epochs) +
                        " loss_ae=" + std::to_string(r.loss_ae) + " loss_cx=" +
                        std::to_string(r.loss_cx) + " loss_cz=" + std::to_string(r.loss_cz));
      });
  model.normalization = norm;
  Paths out{out_path(c, artifact::model), out_path(c, artifact::training_report)};
  save_model(model, out[0]);
  report.save_csv(out[1]);
  return out;
}

Paths cmd_detect(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  const AAEModel model = load_trained(c);
  const TimeSeries test = load_csv(require(c, artifact::test));
  const Detection d = detect(AAEWindowModel(model), normalize(test, *model.normalization),
                             detect_options(c));
  Paths out{out_path(c, artifact::scores), out_path(c, artifact::detections),
            out_path(c, artifact::point_scores), out_path(c, artifact::detection_meta)};
  save_scores_csv(d, out[0]);
  save_labels_csv(test, d.flags, out[1]);
  {
    std::ostringstream ps;
    ps.precision(17);
    ps << "timestamp,score\n";
    for (std::size_t i = 0; i < test.size(); ++i) {
      ps << format_timestamp(test.timestamps[i], test.format) << ',';
      if (std::isfinite(d.point_scores[i])) ps << d.point_scores[i];
      ps << '\n';
    }
    write_text(out[2], ps.str());
  }
  const json meta = {{"threshold", d.threshold},
                     {"threshold_rule", to_string(c.detect.threshold_rule)},
                     {"aggregation", to_string(d.aggregation)},
                     {"critic_orientation", to_string(c.detect.orientation)},
                     {"window_size", model.config.window_size},
                     {"window_step", c.window_step}};
  write_text(out[3], meta.dump(1) + "\n");
  std::size_t flagged = 0;
  for (bool f : d.flags) flagged += f;
  note(log, "flagged " + std::to_string(flagged) + " of " + std::to_string(test.size()) +
                " points (threshold " + std::to_string(d.threshold) + ")");
  return out;
}

Paths cmd_evaluate(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  const std::vector<bool> truth = load_labels_csv(require(c, artifact::labels));
  const std::vector<bool> flags = load_labels_csv(require(c, artifact::detections));
  const CsvTable windows = read_numeric_csv(require(c, artifact::scores));
  const std::vector<double> points = read_numeric_csv(require(c, artifact::point_scores)).column("score");
  const json meta = json::parse(read_text(require(c, artifact::detection_meta)));
  const auto n = meta.at("window_size").get<std::size_t>();

  const MetricRow point = evaluate(flags, truth);
  const std::vector<double> a = windows.column("A");
  const std::vector<double> starts = windows.column("window_start");
  std::vector<bool> window_truth(a.size(), false);
  for (std::size_t w = 0; w < a.size(); ++w) {
    const auto s = static_cast<std::size_t>(starts[w]);
    for (std::size_t t = s; t < std::min(truth.size(), s + n); ++t) window_truth[w] = window_truth[w] || truth[t];
  }
  const std::vector<bool> window_flags = apply_threshold(a, threshold_three_sigma(a));
  const MetricRow window = evaluate(window_flags, window_truth);
  auto auc = [](std::span<const double> s, const std::vector<bool>& t) -> json {
    const bool both = std::find(t.begin(), t.end(), true) != t.end() &&
                      std::find(t.begin(), t.end(), false) != t.end();
    return both ? json(roc_auc(s, t)) : json(nullptr);
  };
  std::vector<double> point_scores = points;
  for (double& v : point_scores)
    if (std::isnan(v)) v = -std::numeric_limits<double>::infinity();
  const json doc = {{"point", metric_json(point)},
                    {"window", metric_json(window)},
                    {"roc_auc_point", auc(point_scores, truth)},
                    {"roc_auc_window", auc(a, window_truth)},
                    {"threshold", meta.at("threshold")},
                    {"aggregation", meta.at("aggregation")}};
  Paths out{out_path(c, artifact::metrics_json), out_path(c, artifact::metrics_md)};
  write_text(out[0], doc.dump(1) + "\n");
  baselines::ComparisonTable table;
  table.rows.push_back({"AAE (points)", point, {}});
  table.rows.push_back({"AAE (windows)", window, {}});
  write_text(out[1], table.to_markdown());
  note(log, "point-level F1 " + std::to_string(point.f1) + ", recall " + std::to_string(point.recall) +
                ", precision " + std::to_string(point.precision));
  return out;
}

Paths cmd_compare(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  const AAEModel model = load_trained(c);
  const TimeSeries train = normalize(load_csv(require(c, artifact::train)), *model.normalization);
  const TimeSeries test = normalize(load_csv(require(c, artifact::test)), *model.normalization);
  const std::vector<bool> labels = load_labels_csv(require(c, artifact::labels));
  baselines::ComparisonSettings settings = comparison_settings(c);
  settings.aae = model.config;
  settings.progress = [log](const std::string& msg) { note(log, msg); };
  const auto table = baselines::run_comparison(model, {&train, &test, &labels}, settings);
  Paths out{out_path(c, artifact::comparison_md), out_path(c, artifact::comparison_csv)};
  write_text(out[0], table.to_markdown());
  table.save_csv(out[1]);
  note(log, table.to_markdown());
  return out;
}

Paths cmd_report(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  const AAEModel model = load_trained(c);
  const TimeSeries test = load_csv(require(c, artifact::test));
  const std::size_t n = model.config.window_size;
  Paths out;

  {
    // Reconstruction per point: mean over every window that covers it.
    const WindowSet windows = make_windows(normalize(test, *model.normalization), n, c.window_step);
    const nn::Matrix rec = windows.count() > 0 ? reconstruct(model, nn::Matrix(windows.windows))
                                               : nn::Matrix(0, static_cast<nn::Index>(n));
    std::vector<double> sum(test.size(), 0.0), cnt(test.size(), 0.0);
    for (std::size_t w = 0; w < windows.count(); ++w)
      for (std::size_t t = 0; t < n; ++t) {
        sum[windows.starts[w] + t] += rec(static_cast<nn::Index>(w), static_cast<nn::Index>(t));
        cnt[windows.starts[w] + t] += 1.0;
      }
    std::vector<double> x(test.size()), recon(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      x[i] = static_cast<double>(i);
      recon[i] = cnt[i] > 0 ? model.normalization->invert(sum[i] / cnt[i])
                            : std::numeric_limits<double>::quiet_NaN();
    }
    LinePlot plot{"Test series and reconstruction", "sample", "value", 960, 360, {}};
    if (fs::exists(out_path(c, artifact::test_clean)))
      plot.lines.push_back({"clean", x, load_csv(out_path(c, artifact::test_clean)).values, "#2ca02c", true});
    plot.lines.push_back({"observed", x, test.values, "#1f77b4", false});
    plot.lines.push_back({"reconstructed", x, recon, "#d62728", false});
    out.push_back(out_path(c, artifact::series_plot));
    save_svg(plot, out.back());
  }

  if (fs::exists(out_path(c, artifact::training_report))) {
    const CsvTable losses = read_numeric_csv(out_path(c, artifact::training_report));
    const auto epoch = losses.column("epoch");
    LinePlot plot{"Training losses", "epoch", "loss", 960, 360, {}};
    plot.lines.push_back({"decoder", epoch, losses.column("loss_dec"), "#1f77b4", false});
    plot.lines.push_back({"critic x", epoch, losses.column("loss_cx"), "#d62728", false});
    plot.lines.push_back({"critic z", epoch, losses.column("loss_cz"), "#9467bd", false});
    plot.lines.push_back({"reconstruction mse", epoch, losses.column("loss_ae"), "#2ca02c", false});
    out.push_back(out_path(c, artifact::loss_plot));
    save_svg(plot, out.back());
  }

  if (fs::exists(out_path(c, artifact::point_scores))) {
    const std::vector<double> scores = read_numeric_csv(out_path(c, artifact::point_scores)).column("score");
    double threshold = threshold_three_sigma(scores);
    if (fs::exists(out_path(c, artifact::detection_meta)))
      threshold = json::parse(read_text(out_path(c, artifact::detection_meta))).at("threshold").get<double>();
    std::vector<double> x(scores.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    LinePlot plot{"Anomaly score", "sample", "score", 960, 360, {}};
    plot.lines.push_back({"score", x, scores, "#1f77b4", false});
    plot.lines.push_back({"threshold", {0.0, x.empty() ? 1.0 : x.back()}, {threshold, threshold}, "#d62728", true});
    if (fs::exists(out_path(c, artifact::labels))) {
      const auto labels = load_labels_csv(out_path(c, artifact::labels));
      std::vector<double> marks(labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i)
        marks[i] = labels[i] ? threshold : std::numeric_limits<double>::quiet_NaN();
      plot.lines.push_back({"attacked", x, marks, "#ff7f0e", false});
    }
    out.push_back(out_path(c, artifact::score_plot));
    save_svg(plot, out.back());
  }
  note(log, "wrote " + std::to_string(out.size()) + " plots");
  return out;
}

std::vector<std::string> command_names() {
  return {"generate", "attack", "train", "detect", "evaluate", "compare", "report"};
}

Paths run_command(const std::string& name, const ExperimentConfig& config, std::ostream* log) {
  if (name == "generate") return cmd_generate(config, log);
  if (name == "attack") return cmd_attack(config, log);
  if (name == "train") return cmd_train(config, log);
  if (name == "detect") return cmd_detect(config, log);
  if (name == "evaluate") return cmd_evaluate(config, log);
  if (name == "compare") return cmd_compare(config, log);
  if (name == "report") return cmd_report(config, log);
  throw std::invalid_argument("unknown command '" + name + "'");
}

}  // namespace fdia
