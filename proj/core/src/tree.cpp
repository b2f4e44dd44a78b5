#include "screenml/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace screenml {

void TreeConfig::validate() const {
  if (max_depth && *max_depth < 1) throw Error(ErrorCode::InvalidConfig, "tree max_depth must be >= 1");
  if (min_samples_split < 2) throw Error(ErrorCode::InvalidConfig, "tree min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw Error(ErrorCode::InvalidConfig, "tree min_samples_leaf must be >= 1");
}

double predict_nodes(const std::vector<TreeNode>& nodes, std::span<const double> row) {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                          : n.right);
  }
  return nodes[i].value;
}

nlohmann::json nodes_to_json(const std::vector<TreeNode>& nodes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& n : nodes) out.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  return out;
}

std::vector<TreeNode> nodes_from_json(const nlohmann::json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j) {
    nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                     n.at(3).get<int>(), n.at(4).get<double>()});
  }
  if (nodes.empty()) throw Error(ErrorCode::ParseError, "tree without nodes");
  for (const auto& n : nodes) {
    if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= static_cast<int>(nodes.size()) ||
                         n.right >= static_cast<int>(nodes.size()))) {
      throw Error(ErrorCode::ParseError, "tree node child index out of range");
    }
  }
  return nodes;
}

double gini(double positive_weight, double total_weight) {
  if (total_weight <= 0.0) return 0.0;
  const double p1 = positive_weight / total_weight;
  const double p0 = 1.0 - p1;
  return 1.0 - p1 * p1 - p0 * p0;
}

std::vector<double> DecisionTree::score(const Matrix& x) const {
  check_score_inputs(n_features_, x);
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_row(x.row(r));
  return out;
}

nlohmann::json DecisionTree::params() const {
  return {{"n_features", n_features_}, {"nodes", nodes_to_json(nodes_)}};
}

std::shared_ptr<const DecisionTree> DecisionTree::from_params(const nlohmann::json& p) {
  return std::make_shared<DecisionTree>(nodes_from_json(p.at("nodes")),
                                        p.at("n_features").get<std::size_t>());
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

constexpr double kGainTieTolerance = 1e-12;

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, const TreeConfig& cfg,
              const TreeGrowOptions& opt)
      : x_(x), y_(y), cfg_(cfg), opt_(opt) {
    if (opt.rows.empty()) {
      rows_.resize(x.rows());
      std::iota(rows_.begin(), rows_.end(), std::size_t{0});
    } else {
      rows_.assign(opt.rows.begin(), opt.rows.end());
    }
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  std::vector<TreeNode> build() {
    nodes_.clear();
    nodes_.emplace_back();
    grow(0, 0, rows_.size(), 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = -std::numeric_limits<double>::infinity();
  };

  double weight(std::size_t row) const {
    return opt_.sample_weights.empty() ? 1.0 : opt_.sample_weights[row];
  }

  void grow(std::size_t node, std::size_t begin, std::size_t end, int depth) {
    double total = 0.0;
    double positive = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double w = weight(rows_[i]);
      total += w;
      if (y_[rows_[i]]) positive += w;
    }
    nodes_[node].value = total > 0.0 ? positive / total : 0.5;

    const auto n = static_cast<long>(end - begin);
    const bool pure = positive <= 0.0 || positive >= total;
    if (pure || (cfg_.max_depth && depth >= *cfg_.max_depth) || n < cfg_.min_samples_split ||
        n < 2L * cfg_.min_samples_leaf) {
      return;
    }
    const Split split = best_split(begin, end, total, positive);
    if (!split.found) return;

    auto mid_it = std::stable_partition(
        rows_.begin() + static_cast<long>(begin), rows_.begin() + static_cast<long>(end),
        [&](std::size_t r) { return x_(r, split.feature) <= split.threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

    const auto left = nodes_.size();
    nodes_.emplace_back();
    const auto right = nodes_.size();
    nodes_.emplace_back();
    nodes_[node].feature = static_cast<int>(split.feature);
    nodes_[node].threshold = split.threshold;
    nodes_[node].left = static_cast<int>(left);
    nodes_[node].right = static_cast<int>(right);
    grow(left, begin, mid, depth + 1);
    grow(right, mid, end, depth + 1);
  }

  Split best_split(std::size_t begin, std::size_t end, double total, double positive) {
    Split best;
    const double parent = gini(positive, total);
    if (opt_.max_features == 0 || opt_.max_features >= features_.size()) {
      for (auto f : features_) evaluate(f, begin, end, total, positive, parent, best);
      return best;
    }
    // Draw a random feature order. The first max_features are searched in
    // ascending order so ties still resolve to the lowest index; if none of
    // them can split the node, the search continues down the order.
    sampled_ = features_;
    for (std::size_t i = 0; i + 1 < sampled_.size(); ++i) {
      const auto j = i + static_cast<std::size_t>(opt_.rng->index(sampled_.size() - i));
      std::swap(sampled_[i], sampled_[j]);
    }
    const auto head = static_cast<long>(opt_.max_features);
    std::sort(sampled_.begin(), sampled_.begin() + head);
    for (std::size_t i = 0; i < sampled_.size(); ++i) {
      if (i >= opt_.max_features && best.found) break;
      evaluate(sampled_[i], begin, end, total, positive, parent, best);
    }
    return best;
  }

  void evaluate(std::size_t f, std::size_t begin, std::size_t end, double total, double positive,
                double parent, Split& best) {
    const auto n = end - begin;
    const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
    column_.clear();
    for (std::size_t i = begin; i < end; ++i) column_.emplace_back(x_(rows_[i], f), rows_[i]);
    std::sort(column_.begin(), column_.end());
    if (column_.front().first == column_.back().first) return;

    double left_total = 0.0;
    double left_positive = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto row = column_[i].second;
      const double w = weight(row);
      left_total += w;
      if (y_[row]) left_positive += w;
      const double lo = column_[i].first;
      const double hi = column_[i + 1].first;
      if (!(lo < hi)) continue;
      if (i + 1 < min_leaf || n - i - 1 < min_leaf) continue;
      const double right_total = total - left_total;
      const double right_positive = positive - left_positive;
      const double children = (left_total / total) * gini(left_positive, left_total) +
                              (right_total / total) * gini(right_positive, right_total);
      const double gain = parent - children;
      if (gain > best.gain + kGainTieTolerance) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = {true, f, threshold, gain};
      }
    }
  }

  const Matrix& x_;
  std::span<const int> y_;
  const TreeConfig& cfg_;
  const TreeGrowOptions& opt_;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> sampled_;
  std::vector<std::pair<double, std::size_t>> column_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree grow_tree(const Matrix& x, std::span<const int> y, const TreeConfig& cfg,
                       const TreeGrowOptions& options) {
  check_fit_inputs(x, y);
  cfg.validate();
  if (options.max_features > 0 && options.max_features < x.cols() && options.rng == nullptr) {
    throw Error(ErrorCode::InvalidConfig, "feature subsampling needs a random generator");
  }
  if (!options.sample_weights.empty() && options.sample_weights.size() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "sample weight count differs from row count");
  }
  TreeBuilder builder(x, y, cfg, options);
  return DecisionTree(builder.build(), x.cols());
}

std::shared_ptr<const DecisionTree> tree_fit(const Matrix& x, std::span<const int> y,
                                             const TreeConfig& cfg) {
  return std::make_shared<DecisionTree>(grow_tree(x, y, cfg));
}

}  // namespace screenml
