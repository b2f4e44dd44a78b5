#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace screenml {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// prediction = 1 iff score >= threshold.
std::vector<int> apply_threshold(std::span<const double> scores, double threshold);

ConfusionMatrix confusion(std::span<const int> y, std::span<const int> predicted);

// Zero denominators yield 0.
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double f1(const ConfusionMatrix& cm);
double f1(double precision, double recall);
double accuracy(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0, 0) endpoint
};

struct RocCurve {
  std::vector<RocPoint> points;

  std::string to_csv() const;  // threshold,fpr,tpr
};

/// Tied scores collapse into one point; starts at (0, 0) and ends at (1, 1).
RocCurve roc_curve(std::span<const int> y, std::span<const double> scores);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);
double roc_auc(std::span<const int> y, std::span<const double> scores);

struct MetricsRow {
  std::string algorithm;
  std::string adjustments;
  double threshold = 0.5;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

MetricsRow metrics_at(std::span<const int> y, std::span<const double> scores, double threshold,
                      std::string algorithm = {}, std::string adjustments = {});

struct ThresholdObjective {
  enum class Kind { max_f1, max_recall_with_precision_floor };
  Kind kind = Kind::max_f1;
  double precision_floor = 0.0;

  static ThresholdObjective max_f1() { return {}; }
  static ThresholdObjective recall_with_precision_floor(double floor) {
    return {Kind::max_recall_with_precision_floor, floor};
  }
  std::string describe() const;
  static ThresholdObjective parse(const std::string& text);
};

struct SweepResult {
  std::vector<MetricsRow> rows;
  std::size_t best_index = 0;
  double best_threshold = 0.0;
  /// No threshold met the precision floor; best is the max-precision threshold.
  bool fallback = false;
};

/// 0.05, 0.10, ..., 0.95.
std::vector<double> default_threshold_grid();

/// Ties in the objective resolve to the lowest threshold.
SweepResult sweep_thresholds(std::span<const int> y, std::span<const double> scores,
                             std::span<const double> grid, const ThresholdObjective& objective,
                             const std::string& algorithm = {}, const std::string& adjustments = {});

}  // namespace screenml
