#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fdia/aae.hpp"
#include "fdia/baselines/kmeans.hpp"
#include "fdia/baselines/linreg.hpp"
#include "fdia/baselines/ocsvm.hpp"
#include "fdia/baselines/reconstruction.hpp"
#include "fdia/metrics.hpp"
#include "fdia/scoring.hpp"

namespace fdia::baselines {

struct ComparisonSettings {
  /// Architecture shared by the adversarial model and the recurrent baseline.
  AAEConfig aae;
  /// Training schedule for the autoencoder baselines (critics never used).
  TrainConfig train;
  std::uint64_t init_seed = 0;
  std::size_t latent_dim = 20;
  KMeansConfig kmeans;
  LinRegConfig linreg;
  OCSVMConfig ocsvm;
  /// Window step and point aggregation shared by every window detector.
  DetectOptions detect;
  std::vector<BaselineKind> kinds{BaselineKind::ae_lstm, BaselineKind::ae_cnn, BaselineKind::ae_fc,
                                  BaselineKind::kmeans,  BaselineKind::linreg, BaselineKind::ocsvm};
  std::function<void(const std::string&)> progress;
};

struct MethodResult {
  std::string name;
  MetricRow metrics;
  Detection detection;
};

struct ComparisonTable {
  std::vector<MethodResult> rows;

  const MethodResult& row(const std::string& name) const;
  /// Aligned markdown with ACC / Prec / Rec / F1 in percent.
  std::string to_markdown() const;
  /// `method,tp,fp,tn,fn,accuracy,precision,recall,f1`.
  void save_csv(const std::filesystem::path& path) const;
};

std::string display_name(BaselineKind kind);

/// Series inputs must already be normalized with the training parameters.
struct ComparisonData {
  const TimeSeries* train = nullptr;
  const TimeSeries* test = nullptr;
  const std::vector<bool>* labels = nullptr;
};

MethodResult evaluate_method(std::string name, Detection detection, const std::vector<bool>& labels);

/// Point detection for a single baseline, trained on `data.train`.
Detection run_baseline(BaselineKind kind, const ComparisonData& data, const ComparisonSettings& settings);

/// One row for the adversarial model (first) and one per selected baseline.
ComparisonTable run_comparison(const AAEModel& model, const ComparisonData& data,
                               const ComparisonSettings& settings);

}  // namespace fdia::baselines
