#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenml/error.hpp"
#include "screenml/metrics.hpp"
#include "screenml/model_spec.hpp"
#include "screenml/synthetic.hpp"
#include "screenml/validation.hpp"

namespace screenml {

std::string_view toolkit_version();

/// 2 for configuration problems, 3 for data problems.
int exit_code_for(ErrorCode code);

inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitAllModelsFailed = 4;

struct ModelEntry {
  std::string name;
  std::string adjustments;
  nlohmann::json model;  // ModelSpec document, grid-searched when a grid is configured
  std::optional<ResampleSpec> resample;
};

struct ExperimentConfig {
  std::optional<SynthConfig> synthetic;
  bool synthetic_seed_given = false;
  std::filesystem::path csv;
  std::filesystem::path schema;
  std::string segment = "bd2";  // bd1 | bd2 | all
  std::optional<std::filesystem::path> births;
  double test_fraction = 0.2;
  ResampleSpec resample;
  std::vector<ModelEntry> models;
  std::vector<double> threshold_grid = default_threshold_grid();
  std::vector<ThresholdObjective> objectives{ThresholdObjective::max_f1()};
  std::optional<int> cv_folds;
  std::map<std::string, ParamGrid> grids;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;

  /// Relative paths resolve against `base_dir`. Throws InvalidConfig.
  static ExperimentConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical JSON without the output path, as 16 hex digits.
  std::string digest() const;
  void validate() const;
};

/// Columns 1-7 are fixed; the rest describe where the row came from.
inline constexpr std::array<std::string_view, 7> kMetricsColumns{
    "algorithm", "adjustments", "threshold", "precision", "recall", "f1", "accuracy"};
inline constexpr std::array<std::string_view, 5> kMetricsExtraColumns{
    "segment", "row_type", "objective", "fallback", "auc"};

struct MetricsRecord {
  MetricsRow row;
  std::string segment;
  std::string row_type;  // sweep | best
  std::string objective;
  bool fallback = false;
  std::optional<double> auc;
};

std::string metrics_csv(const std::vector<MetricsRecord>& records);
/// Throws SchemaMismatch unless the first seven header fields match kMetricsColumns.
std::vector<MetricsRecord> parse_metrics_csv(std::string_view text, const std::string& source = {});

struct ModelFailure {
  std::string name;
  std::string adjustments;
  std::string step;
  std::string message;
};

struct ModelOutcome {
  std::string name;
  std::string adjustments;
  double auc = 0.0;
  SweepResult sweep;
  std::vector<SweepResult> best_per_objective;
  std::string roc_path;
  std::string scores_path;
  std::string model_path;
  std::optional<nlohmann::json> grid_choice;
};

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  std::vector<ModelOutcome> outcomes;
  std::vector<ModelFailure> failures;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;  // relative to the output directory
  nlohmann::json manifest;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t n_features = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes data.csv, schema.json and births.csv.
std::vector<std::filesystem::path> cmd_synth(const SynthConfig& cfg, const std::filesystem::path& out_dir);

/// Best rows (or all rows for files without row_type), stably ordered by (segment, algorithm),
/// rendered as one markdown table per segment.
std::string cmd_report(const std::vector<std::filesystem::path>& metrics_paths);

std::string render_table(const std::vector<MetricsRecord>& records);

struct ScoredLabels {
  std::string name;
  Labels y;
  std::vector<double> scores;
};

std::string scores_csv(std::span<const int> y, std::span<const double> scores);
ScoredLabels load_scores(const std::filesystem::path& path);

/// Static SVG with one ROC polyline per input.
std::string roc_svg(const std::vector<std::pair<std::string, RocCurve>>& curves);

std::string slugify(std::string_view text);

}  // namespace screenml
