#pragma once

#include "screenml/tree.hpp"

namespace screenml {

struct GbtConfig {
  int n_rounds = 100;
  double shrinkage = 0.1;
  int max_depth = 3;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;

  void validate() const;
};

/// Newton leaf weight -G / (H + lambda).
double leaf_weight(double grad_sum, double hess_sum, double lambda);

/// Structure-score gain of splitting a node into (GL, HL) and (GR, HR), minus gamma.
double split_gain(double gl, double hl, double gr, double hr, double lambda, double gamma);

/// Additive logistic model on log-odds built from second-order regression trees.
class GradientBoostedTrees final : public Model {
 public:
  GradientBoostedTrees(double base_margin, double shrinkage,
                       std::vector<std::vector<TreeNode>> trees, std::size_t n_features)
      : base_margin_(base_margin),
        shrinkage_(shrinkage),
        trees_(std::move(trees)),
        n_features_(n_features) {}

  std::string_view kind() const override { return "gbt"; }
  std::size_t n_features() const override { return n_features_; }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;
  static std::shared_ptr<const GradientBoostedTrees> from_params(const nlohmann::json& p);

  std::vector<double> margin(const Matrix& x) const;
  double base_margin() const noexcept { return base_margin_; }
  const std::vector<std::vector<TreeNode>>& trees() const noexcept { return trees_; }

  /// Mean training log-loss before the first round and after each round.
  /// Not persisted.
  const std::vector<double>& training_loss() const noexcept { return training_loss_; }
  void set_training_loss(std::vector<double> trace) { training_loss_ = std::move(trace); }

 private:
  double base_margin_;
  double shrinkage_;
  std::vector<std::vector<TreeNode>> trees_;
  std::size_t n_features_;
  std::vector<double> training_loss_;
};

std::shared_ptr<const GradientBoostedTrees> gbt_fit(const Matrix& x, std::span<const int> y,
                                                    const GbtConfig& cfg = {});

}  // namespace screenml
