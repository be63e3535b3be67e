#include "fdia/baselines/comparison.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fdia::baselines {

std::string display_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::ae_lstm: return "AE-LSTM";
    case BaselineKind::ae_cnn: return "AE-CNN";
    case BaselineKind::ae_fc: return "AE-FC";
    case BaselineKind::kmeans: return "K-Means";
    case BaselineKind::linreg: return "LR";
    case BaselineKind::ocsvm: return "OCSVM";
  }
  return "?";
}

const MethodResult& ComparisonTable::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw std::out_of_range("no comparison row named " + name);
}

std::string ComparisonTable::to_markdown() const {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  std::ostringstream out;
  out << "| " << pad("Method") << " |  ACC (%) | Prec (%) |  Rec (%) |   F1 (%) |\n";
  out << "|" << std::string(width + 2, '-') << "|---------:|---------:|---------:|---------:|\n";
  char buf[64];
  for (const auto& r : rows) {
    out << "| " << pad(r.name) << " |";
    for (double v : {r.metrics.accuracy, r.metrics.precision, r.metrics.recall, r.metrics.f1}) {
      std::snprintf(buf, sizeof buf, " %8.2f |", 100.0 * v);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

void ComparisonTable::save_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.precision(17);
  out << "method,tp,fp,tn,fn,accuracy,precision,recall,f1\n";
  for (const auto& r : rows) {
    const auto& c = r.metrics.counts;
    out << r.name << ',' << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn << ','
        << r.metrics.accuracy << ',' << r.metrics.precision << ',' << r.metrics.recall << ','
        << r.metrics.f1 << '\n';
  }
}

MethodResult evaluate_method(std::string name, Detection detection, const std::vector<bool>& labels) {
  MethodResult r;
  r.name = std::move(name);
  r.metrics = evaluate(detection.flags, labels);
  r.detection = std::move(detection);
  return r;
}

namespace {

void check(const ComparisonData& data) {
  if (data.train == nullptr || data.test == nullptr || data.labels == nullptr)
    throw std::invalid_argument("comparison needs train series, test series and labels");
  if (data.labels->size() != data.test->size())
    throw std::invalid_argument("label count does not match the test series");
}

Detection from_window_scores(std::vector<double> raw, const WindowSet& windows,
                             const DetectOptions& options) {
  return detect_from_window_scores(reconstruction_scores(raw), windows.starts, windows.window_size,
                                   windows.source_length, options);
}

}  // namespace

Detection run_baseline(BaselineKind kind, const ComparisonData& data,
                       const ComparisonSettings& s) {
  check(data);
  const std::size_t n = s.aae.window_size;
  const std::size_t step = s.detect.step;
  const WindowSet train_w = make_windows(*data.train, n, step);
  DetectOptions ro = s.detect;
  ro.reconstruction_only = true;
  switch (kind) {
    case BaselineKind::ae_lstm: {
      const AAEModel m = train_ae_lstm(s.aae, train_w, s.train, s.init_seed);
      return detect(AAEWindowModel(m), *data.test, ro);
    }
    case BaselineKind::ae_cnn:
    case BaselineKind::ae_fc: {
      Autoencoder ae = kind == BaselineKind::ae_cnn ? build_ae_cnn(n, s.latent_dim, s.init_seed)
                                                    : build_ae_fc(n, s.latent_dim, s.init_seed);
      ae = train_autoencoder(std::move(ae), train_w, s.train);
      return detect(AutoencoderWindowModel(ae), *data.test, ro);
    }
    case BaselineKind::kmeans: {
      const KMeansModel km = fit_kmeans(train_w.windows, s.kmeans);
      const WindowSet test_w = make_windows(*data.test, n, step);
      return from_window_scores(nearest_centroid_distances(km, test_w.windows), test_w, s.detect);
    }
    case BaselineKind::linreg: {
      const LinRegModel lr = fit_linreg(data.train->values, s.linreg);
      Detection d;
      d.aggregation = s.detect.aggregation;
      d.point_scores = linreg_point_residuals(lr, data.test->values);
      d.threshold = threshold_three_sigma(d.point_scores);
      d.flags = apply_threshold(d.point_scores, d.threshold);
      return d;
    }
    case BaselineKind::ocsvm: {
      const OCSVMModel svm = fit_ocsvm(train_w.windows, s.ocsvm);
      const WindowSet test_w = make_windows(*data.test, n, step);
      std::vector<double> outside = decision_function(svm, test_w.windows);
      for (double& v : outside) v = -v;
      return from_window_scores(std::move(outside), test_w, s.detect);
    }
  }
  throw std::logic_error("unhandled baseline");
}

ComparisonTable run_comparison(const AAEModel& model, const ComparisonData& data,
                               const ComparisonSettings& settings) {
  check(data);
  ComparisonTable table;
  if (settings.progress) settings.progress("scoring AAE");
  table.rows.push_back(
      evaluate_method("AAE", detect(AAEWindowModel(model), *data.test, settings.detect), *data.labels));
  for (BaselineKind kind : settings.kinds) {
    if (settings.progress) settings.progress("training " + display_name(kind));
    table.rows.push_back(
        evaluate_method(display_name(kind), run_baseline(kind, data, settings), *data.labels));
  }
  return table;
}

}  // namespace fdia::baselines
