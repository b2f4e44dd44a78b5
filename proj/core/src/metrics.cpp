#include "screenml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <numeric>
#include <sstream>

#include "screenml/csv.hpp"
#include "screenml/dataset.hpp"
#include "screenml/error.hpp"

namespace screenml {

std::vector<int> apply_threshold(std::span<const double> scores, double threshold) {
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
  return out;
}

ConfusionMatrix confusion(std::span<const int> y, std::span<const int> predicted) {
  if (y.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "labels and predictions differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i]) {
      predicted[i] ? ++cm.tp : ++cm.fn;
    } else {
      predicted[i] ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double precision(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fp); }
double recall(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }
double accuracy(const ConfusionMatrix& cm) { return ratio(cm.tp + cm.tn, cm.total()); }

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

double f1(const ConfusionMatrix& cm) { return f1(precision(cm), recall(cm)); }

std::string RocCurve::to_csv() const {
  std::ostringstream out;
  out << "threshold,fpr,tpr\n";
  for (const auto& p : points) {
    out << (std::isinf(p.threshold) ? std::string("inf") : format_number(p.threshold)) << ','
        << format_number(p.fpr) << ',' << format_number(p.tpr) << '\n';
  }
  return out.str();
}

RocCurve roc_curve(std::span<const int> y, std::span<const double> scores) {
  if (y.size() != scores.size()) throw Error(ErrorCode::LengthMismatch, "labels and scores differ in length");
  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const auto negatives = y.size() - positives;
  if (positives == 0 || negatives == 0) throw Error(ErrorCode::SingleClass, "ROC needs both classes");

  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      y[order[i]] ? ++tp : ++fp;
      ++i;
    }
    curve.points.push_back({ratio(fp, negatives), ratio(tp, positives), s});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

double roc_auc(std::span<const int> y, std::span<const double> scores) {
  return auc(roc_curve(y, scores));
}

MetricsRow metrics_at(std::span<const int> y, std::span<const double> scores, double threshold,
                      std::string algorithm, std::string adjustments) {
  const auto cm = confusion(y, apply_threshold(scores, threshold));
  return {std::move(algorithm), std::move(adjustments), threshold,
          precision(cm),        recall(cm),             f1(cm),
          accuracy(cm)};
}

std::string ThresholdObjective::describe() const {
  if (kind == Kind::max_f1) return "max_f1";
  return "max_recall_with_precision_floor:" + format_number(precision_floor);
}

ThresholdObjective ThresholdObjective::parse(const std::string& text) {
  if (text == "max_f1") return max_f1();
  const std::string prefix = "max_recall_with_precision_floor:";
  if (text.rfind(prefix, 0) == 0) {
    try {
      return recall_with_precision_floor(std::stod(text.substr(prefix.size())));
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown threshold objective '" + text + "'");
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

SweepResult sweep_thresholds(std::span<const int> y, std::span<const double> scores,
                             std::span<const double> grid, const ThresholdObjective& objective,
                             const std::string& algorithm, const std::string& adjustments) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "threshold grid is empty");
  std::vector<double> sorted(grid.begin(), grid.end());
  for (double t : sorted) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidConfig, "thresholds must lie in [0, 1]");
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  SweepResult out;
  for (double t : sorted) out.rows.push_back(metrics_at(y, scores, t, algorithm, adjustments));

  auto argmax = [&](auto key, auto admissible) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
      if (!admissible(out.rows[i])) continue;
      if (!best || key(out.rows[i]) > key(out.rows[*best])) best = i;
    }
    return best;
  };
  auto any = [](const MetricsRow&) { return true; };

  std::optional<std::size_t> best;
  if (objective.kind == ThresholdObjective::Kind::max_f1) {
    best = argmax([](const MetricsRow& r) { return r.f1; }, any);
  } else {
    best = argmax([](const MetricsRow& r) { return r.recall; },
                  [&](const MetricsRow& r) { return r.precision >= objective.precision_floor; });
    if (!best) {
      best = argmax([](const MetricsRow& r) { return r.precision; }, any);
      out.fallback = true;
    }
  }
  out.best_index = *best;
  out.best_threshold = out.rows[*best].threshold;
  return out;
}

}  // namespace screenml
