#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenml/model.hpp"
#include "screenml/resample.hpp"

namespace screenml {

struct CvPlan {
  int n_folds = 5;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;

  std::vector<std::size_t> train_indices(int fold) const;
  std::vector<std::size_t> test_indices(int fold) const;
};

/// Seeded per-class shuffle, then round-robin fold assignment. The fold
/// counter carries over from one class to the next so fold sizes stay level.
CvPlan stratified_kfold(std::span<const int> labels, int n_folds, std::uint64_t seed);

struct FoldMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
};

struct CvResult {
  std::vector<FoldMetrics> folds;
  FoldMetrics mean;
  FoldMetrics sd;  // sample standard deviation across folds
};

/// Applies `spec` to (x, y) and trains on the result.
FittedModel resample_and_fit(const Learner& learner, const Matrix& x, std::span<const int> y,
                             const ResampleSpec& spec, std::uint64_t seed);

/// Observes the training rows handed to the resampler for each fold.
using ResampleHook = std::function<void(int fold, std::span<const std::size_t> train_rows)>;

/// Resamples the training part of each fold only, fits, and scores the held-out part at t = 0.5.
CvResult cross_validate(const Learner& learner, const Matrix& x, std::span<const int> y,
                        const CvPlan& plan, const ResampleSpec& resample, std::uint64_t seed,
                        const ResampleHook& on_resample = {});

/// Dotted parameter path -> candidate values. Keys iterate in sorted order,
/// the last key varying fastest.
using ParamGrid = std::map<std::string, std::vector<nlohmann::json>>;

/// Writes `value` at a dotted path such as "tree.max_depth", creating objects as needed.
void set_param(nlohmann::json& config, const std::string& dotted_path, const nlohmann::json& value);

/// Every configuration a grid expands to, in evaluation order.
std::vector<nlohmann::json> expand_grid(const nlohmann::json& base, const ParamGrid& grid);

using LearnerFactory = std::function<Learner(const nlohmann::json& config)>;

struct GridRow {
  nlohmann::json config;
  CvResult cv;
};

struct GridSearchResult {
  std::vector<GridRow> rows;
  std::size_t best_index = 0;

  const nlohmann::json& best_config() const { return rows.at(best_index).config; }
};

/// Ranks configurations by mean fold F1 at threshold 0.5; the first wins ties.
GridSearchResult grid_search(const nlohmann::json& base, const ParamGrid& grid,
                             const LearnerFactory& factory, const Matrix& x,
                             std::span<const int> y, const CvPlan& plan,
                             const ResampleSpec& resample, std::uint64_t seed);

}  // namespace screenml
