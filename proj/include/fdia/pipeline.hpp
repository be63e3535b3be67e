#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdia/config.hpp"

namespace fdia {

/// An upstream file a command depends on does not exist.
class MissingArtifact : public std::runtime_error {
 public:
  explicit MissingArtifact(const std::filesystem::path& path)
      : std::runtime_error("missing artifact: " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// File names inside the output directory.
namespace artifact {
inline constexpr const char* series = "series.csv";
inline constexpr const char* train = "train.csv";
inline constexpr const char* test = "test.csv";
inline constexpr const char* test_clean = "test_clean.csv";
inline constexpr const char* labels = "labels.csv";
inline constexpr const char* model = "model.json";
inline constexpr const char* training_report = "training_report.csv";
inline constexpr const char* scores = "scores.csv";
inline constexpr const char* point_scores = "point_scores.csv";
inline constexpr const char* detections = "detections.csv";
inline constexpr const char* detection_meta = "detection.json";
inline constexpr const char* metrics_json = "metrics.json";
inline constexpr const char* metrics_md = "metrics.md";
inline constexpr const char* comparison_md = "comparison.md";
inline constexpr const char* comparison_csv = "comparison.csv";
inline constexpr const char* series_plot = "series.svg";
inline constexpr const char* loss_plot = "losses.svg";
inline constexpr const char* score_plot = "scores.svg";
inline constexpr const char* config = "config.txt";
}  // namespace artifact

using Paths = std::vector<std::filesystem::path>;

/// Each command reads its inputs from and writes its outputs to config.out_dir
/// and returns the files it wrote. `log` receives progress lines when set.
Paths cmd_generate(const ExperimentConfig& config, std::ostream* log = nullptr);
Paths cmd_attack(const ExperimentConfig& config, std::ostream* log = nullptr);
Paths cmd_train(const ExperimentConfig& config, std::ostream* log = nullptr);
Paths cmd_detect(const ExperimentConfig& config, std::ostream* log = nullptr);
Paths cmd_evaluate(const ExperimentConfig& config, std::ostream* log = nullptr);
Paths cmd_compare(const ExperimentConfig& config, std::ostream* log = nullptr);
Paths cmd_report(const ExperimentConfig& config, std::ostream* log = nullptr);

std::vector<std::string> command_names();
/// Dispatches by name; throws std::invalid_argument for unknown commands.
Paths run_command(const std::string& name, const ExperimentConfig& config,
                  std::ostream* log = nullptr);

/// Numeric CSV with a header row; empty cells read as NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const;
};
CsvTable read_numeric_csv(const std::filesystem::path& path);

}  // namespace fdia
