#pragma once

#include <optional>

#include "screenml/model.hpp"
#include "screenml/random.hpp"

namespace screenml {

struct TreeConfig {
  std::optional<int> max_depth;  // empty = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;

  void validate() const;
};

/// Shared node layout for classification and regression trees.
/// Rows with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

double predict_nodes(const std::vector<TreeNode>& nodes, std::span<const double> row);
nlohmann::json nodes_to_json(const std::vector<TreeNode>& nodes);
std::vector<TreeNode> nodes_from_json(const nlohmann::json& j);

/// Gini impurity 1 - p1^2 - p0^2 of a (possibly weighted) node.
double gini(double positive_weight, double total_weight);

/// CART classification tree; leaf value is the (weighted) positive fraction.
class DecisionTree final : public Model {
 public:
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features)
      : nodes_(std::move(nodes)), n_features_(n_features) {}

  std::string_view kind() const override { return "tree"; }
  std::size_t n_features() const override { return n_features_; }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;
  static std::shared_ptr<const DecisionTree> from_params(const nlohmann::json& p);

  double predict_row(std::span<const double> row) const { return predict_nodes(nodes_, row); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_features_;
};

struct TreeGrowOptions {
  /// Training rows (duplicates allowed); empty means every row once.
  std::span<const std::size_t> rows;
  /// Per-row weights indexed by row of x; empty means unit weights.
  std::span<const double> sample_weights;
  /// Features considered per split; 0 means all of them.
  std::size_t max_features = 0;
  /// Required when max_features is in effect.
  Rng* rng = nullptr;
};

/// Greedy CART growth. Splits sit at midpoints of consecutive distinct values;
/// gain ties resolve to the lowest feature index, then the lowest threshold.
DecisionTree grow_tree(const Matrix& x, std::span<const int> y, const TreeConfig& cfg,
                       const TreeGrowOptions& options = {});

std::shared_ptr<const DecisionTree> tree_fit(const Matrix& x, std::span<const int> y,
                                             const TreeConfig& cfg = {});

}  // namespace screenml
