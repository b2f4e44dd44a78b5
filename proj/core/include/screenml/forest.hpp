#pragma once

#include "screenml/tree.hpp"

namespace screenml {

struct ForestConfig {
  int n_trees = 100;
  /// Features tried per split; empty = floor(sqrt(n_features)).
  std::optional<std::size_t> max_features;
  TreeConfig tree;
  bool bootstrap = true;
  /// Worker threads for tree growth. Output does not depend on it.
  int n_threads = 1;

  void validate(std::size_t n_features) const;
};

class RandomForest final : public Model {
 public:
  RandomForest(std::vector<DecisionTree> trees, std::size_t n_features)
      : trees_(std::move(trees)), n_features_(n_features) {}

  std::string_view kind() const override { return "forest"; }
  std::size_t n_features() const override { return n_features_; }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;
  static std::shared_ptr<const RandomForest> from_params(const nlohmann::json& p);

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t n_features_;
};

std::shared_ptr<const RandomForest> forest_fit(const Matrix& x, std::span<const int> y,
                                               const ForestConfig& cfg, std::uint64_t seed);

}  // namespace screenml
