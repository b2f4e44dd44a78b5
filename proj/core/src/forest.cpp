#include "screenml/forest.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

namespace screenml {

void ForestConfig::validate(std::size_t n_features) const {
  if (n_trees <= 0) throw Error(ErrorCode::InvalidConfig, "forest n_trees must be positive");
  if (max_features && (*max_features == 0 || *max_features > n_features)) {
    throw Error(ErrorCode::InvalidConfig, "forest max_features must lie in [1, feature count]");
  }
  if (n_threads <= 0) throw Error(ErrorCode::InvalidConfig, "forest n_threads must be positive");
  tree.validate();
}

std::vector<double> RandomForest::score(const Matrix& x) const {
  check_score_inputs(n_features_, x);
  std::vector<double> out(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict_row(row);
    out[r] = sum / static_cast<double>(trees_.size());
  }
  return out;
}

nlohmann::json RandomForest::params() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(nodes_to_json(t.nodes()));
  return {{"n_features", n_features_}, {"trees", trees}};
}

std::shared_ptr<const RandomForest> RandomForest::from_params(const nlohmann::json& p) {
  const auto n_features = p.at("n_features").get<std::size_t>();
  std::vector<DecisionTree> trees;
  for (const auto& t : p.at("trees")) trees.emplace_back(nodes_from_json(t), n_features);
  if (trees.empty()) throw Error(ErrorCode::ParseError, "forest without trees");
  return std::make_shared<RandomForest>(std::move(trees), n_features);
}

std::shared_ptr<const RandomForest> forest_fit(const Matrix& x, std::span<const int> y,
                                               const ForestConfig& cfg, std::uint64_t seed) {
  check_fit_inputs(x, y);
  cfg.validate(x.cols());
  const std::size_t max_features =
      cfg.max_features.value_or(std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(
                                                            static_cast<double>(x.cols())))));
  const auto n_trees = static_cast<std::size_t>(cfg.n_trees);
  std::vector<std::optional<DecisionTree>> trees(n_trees);

  auto grow_one = [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> rows;
    if (cfg.bootstrap) {
      rows.resize(x.rows());
      for (auto& r : rows) r = static_cast<std::size_t>(rng.index(x.rows()));
    }
    TreeGrowOptions opt;
    opt.rows = rows;
    opt.max_features = max_features;
    opt.rng = &rng;
    trees[t].emplace(grow_tree(x, y, cfg.tree, opt));
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.n_threads), n_trees);
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_trees; ++t) grow_one(t);
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < n_trees; t += workers) grow_one(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<DecisionTree> out;
  out.reserve(n_trees);
  for (auto& t : trees) out.push_back(std::move(*t));
  return std::make_shared<RandomForest>(std::move(out), x.cols());
}

}  // namespace screenml
