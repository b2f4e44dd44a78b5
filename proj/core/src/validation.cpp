#include "screenml/validation.hpp"

#include <algorithm>
#include <cmath>

#include "screenml/error.hpp"
#include "screenml/metrics.hpp"
#include "screenml/random.hpp"

namespace screenml {

std::vector<std::size_t> CvPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> CvPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

CvPlan stratified_kfold(std::span<const int> labels, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error(ErrorCode::InvalidConfig, "n_folds must be at least 2");
  CvPlan plan{n_folds, seed, std::vector<int>(labels.size(), -1)};
  std::size_t counter = 0;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    if (members.size() < static_cast<std::size_t>(n_folds)) {
      throw Error(ErrorCode::TooFewPerClass, "class " + std::to_string(cls) + " has " +
                                                 std::to_string(members.size()) + " rows for " +
                                                 std::to_string(n_folds) + " folds");
    }
    Rng rng(derive_seed(seed, "kfold/" + std::to_string(cls)));
    rng.shuffle(std::span<std::size_t>(members));
    for (auto i : members) plan.fold_of[i] = static_cast<int>(counter++ % n_folds);
  }
  return plan;
}

FittedModel resample_and_fit(const Learner& learner, const Matrix& x, std::span<const int> y,
                             const ResampleSpec& spec, std::uint64_t seed) {
  if (spec.method == ResampleMethod::none) return learner(x, y, seed);
  const auto r = resample(x, y, spec);
  return learner(r.x, r.y, seed);
}

namespace {

FoldMetrics evaluate_fold(std::span<const int> y, std::span<const double> scores) {
  const auto cm = confusion(y, apply_threshold(scores, 0.5));
  FoldMetrics m{precision(cm), recall(cm), f1(cm), accuracy(cm), 0.0};
  m.auc = roc_auc(y, scores);
  return m;
}

template <class Get>
void aggregate(const std::vector<FoldMetrics>& folds, Get get, double& mean, double& sd) {
  const double n = static_cast<double>(folds.size());
  double sum = 0.0;
  for (const auto& f : folds) sum += get(f);
  mean = sum / n;
  double ss = 0.0;
  for (const auto& f : folds) ss += (get(f) - mean) * (get(f) - mean);
  sd = folds.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

}  // namespace

CvResult cross_validate(const Learner& learner, const Matrix& x, std::span<const int> y,
                        const CvPlan& plan, const ResampleSpec& resample, std::uint64_t seed,
                        const ResampleHook& on_resample) {
  if (plan.fold_of.size() != x.rows() || y.size() != x.rows()) {
    throw Error(ErrorCode::LengthMismatch, "CV plan does not cover the data");
  }
  CvResult out;
  for (int fold = 0; fold < plan.n_folds; ++fold) {
    const auto train = plan.train_indices(fold);
    const auto test = plan.test_indices(fold);
    if (on_resample) on_resample(fold, train);

    ResampleSpec spec = resample;
    spec.seed = derive_seed(resample.seed, static_cast<std::uint64_t>(fold));
    const auto fitted = resample_and_fit(learner, x.select_rows(train), select(y, train), spec,
                                         derive_seed(seed, static_cast<std::uint64_t>(fold)));
    const auto y_test = select(y, test);
    out.folds.push_back(evaluate_fold(y_test, fitted->score(x.select_rows(test))));
  }
  aggregate(out.folds, [](const FoldMetrics& f) { return f.precision; }, out.mean.precision, out.sd.precision);
  aggregate(out.folds, [](const FoldMetrics& f) { return f.recall; }, out.mean.recall, out.sd.recall);
  aggregate(out.folds, [](const FoldMetrics& f) { return f.f1; }, out.mean.f1, out.sd.f1);
  aggregate(out.folds, [](const FoldMetrics& f) { return f.accuracy; }, out.mean.accuracy, out.sd.accuracy);
  aggregate(out.folds, [](const FoldMetrics& f) { return f.auc; }, out.mean.auc, out.sd.auc);
  return out;
}

void set_param(nlohmann::json& config, const std::string& dotted_path, const nlohmann::json& value) {
  nlohmann::json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted_path.find('.', start);
    const auto key = dotted_path.substr(start, dot - start);
    if (key.empty()) throw Error(ErrorCode::InvalidConfig, "bad parameter path '" + dotted_path + "'");
    if (!node->is_object()) *node = nlohmann::json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::vector<nlohmann::json> expand_grid(const nlohmann::json& base, const ParamGrid& grid) {
  if (grid.empty()) return {base};
  std::vector<std::pair<const std::string*, const std::vector<nlohmann::json>*>> dims;
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw Error(ErrorCode::EmptyGrid, "grid dimension '" + key + "' is empty");
    dims.emplace_back(&key, &values);
  }
  std::vector<std::size_t> odometer(dims.size(), 0);
  std::vector<nlohmann::json> out;
  while (true) {
    nlohmann::json cfg = base;
    for (std::size_t d = 0; d < dims.size(); ++d) set_param(cfg, *dims[d].first, (*dims[d].second)[odometer[d]]);
    out.push_back(std::move(cfg));
    std::size_t d = dims.size();
    while (d > 0) {
      --d;
      if (++odometer[d] < dims[d].second->size()) break;
      odometer[d] = 0;
      if (d == 0) return out;
    }
  }
}

GridSearchResult grid_search(const nlohmann::json& base, const ParamGrid& grid,
                             const LearnerFactory& factory, const Matrix& x,
                             std::span<const int> y, const CvPlan& plan,
                             const ResampleSpec& resample, std::uint64_t seed) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "parameter grid is empty");
  GridSearchResult out;
  for (auto& cfg : expand_grid(base, grid)) {
    auto cv = cross_validate(factory(cfg), x, y, plan, resample, seed);
    out.rows.push_back({std::move(cfg), std::move(cv)});
  }
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].cv.mean.f1 > out.rows[out.best_index].cv.mean.f1) out.best_index = i;
  }
  return out;
}

}  // namespace screenml
