#include "screenml/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include "screenml/random.hpp"

namespace screenml {

namespace {

constexpr int kMaxRedraws = 10;

using SubsetDraw = std::function<std::vector<std::size_t>(std::span<const double> weights)>;

std::shared_ptr<const AdaBoostModel> boost(const Matrix& x, std::span<const int> y,
                                           const BoostConfig& cfg, const SubsetDraw& draw,
                                           std::string kind, BoostTrace* trace) {
  const auto n = x.rows();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> margin(n, 0.0);
  std::vector<int> h(n);
  std::vector<AdaBoostModel::Stage> stages;

  for (int round = 0; round < cfg.n_estimators; ++round) {
    std::optional<DecisionTree> learner;
    double error = 1.0;
    for (int attempt = 0;; ++attempt) {
      TreeGrowOptions opt;
      std::vector<std::size_t> subset;
      if (draw) {
        subset = draw(w);
        opt.rows = subset;
      }
      opt.sample_weights = w;
      learner.emplace(grow_tree(x, y, cfg.base_tree, opt));
      if (trace) {
        const auto rows = std::span<const std::size_t>(subset);
        trace->learner_classes.push_back(
            rows.empty() ? class_counts(y) : class_counts(select(y, rows)));
      }
      error = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        h[i] = learner->predict_row(x.row(i)) >= 0.5 ? 1 : -1;
        if ((h[i] == 1) != (y[i] == 1)) error += w[i];
      }
      if (error < 0.5 || !draw || attempt + 1 >= kMaxRedraws) break;
      if (trace) ++trace->redraws;
    }
    if (error >= 0.5) break;

    const double alpha = stage_weight(error);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double signed_y = y[i] ? 1.0 : -1.0;
      w[i] *= std::exp(-alpha * signed_y * h[i]);
      total += w[i];
      margin[i] += alpha * h[i];
    }
    for (auto& v : w) v /= total;
    stages.push_back({std::move(*learner), alpha});

    if (trace) {
      trace->weighted_errors.push_back(error);
      trace->weight_sums.push_back(std::accumulate(w.begin(), w.end(), 0.0));
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < n; ++i) wrong += (margin[i] > 0.0) != (y[i] == 1);
      trace->training_errors.push_back(static_cast<double>(wrong) / static_cast<double>(n));
    }
    if (error <= kMinBoostError) break;
  }
  return std::make_shared<AdaBoostModel>(std::move(stages), x.cols(), std::move(kind));
}

}  // namespace

void BoostConfig::validate() const {
  if (n_estimators <= 0) throw Error(ErrorCode::InvalidConfig, "boost n_estimators must be positive");
  base_tree.validate();
}

double stage_weight(double weighted_error) {
  const double e = std::max(weighted_error, kMinBoostError);
  return 0.5 * std::log((1.0 - e) / e);
}

std::vector<double> AdaBoostModel::margin(const Matrix& x) const {
  check_score_inputs(n_features_, x);
  std::vector<double> out(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (const auto& s : stages_) out[r] += s.alpha * (s.learner.predict_row(row) >= 0.5 ? 1.0 : -1.0);
  }
  return out;
}

std::vector<double> AdaBoostModel::score(const Matrix& x) const {
  auto m = margin(x);
  for (auto& v : m) v = sigmoid(v);
  return m;
}

nlohmann::json AdaBoostModel::params() const {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : stages_) stages.push_back({{"alpha", s.alpha}, {"nodes", nodes_to_json(s.learner.nodes())}});
  return {{"n_features", n_features_}, {"stages", stages}};
}

std::shared_ptr<const AdaBoostModel> AdaBoostModel::from_params(const nlohmann::json& p,
                                                                std::string kind) {
  const auto n_features = p.at("n_features").get<std::size_t>();
  std::vector<Stage> stages;
  for (const auto& s : p.at("stages")) {
    stages.push_back({DecisionTree(nodes_from_json(s.at("nodes")), n_features), s.at("alpha").get<double>()});
  }
  return std::make_shared<AdaBoostModel>(std::move(stages), n_features, std::move(kind));
}

std::shared_ptr<const AdaBoostModel> adaboost_fit(const Matrix& x, std::span<const int> y,
                                                  const BoostConfig& cfg, BoostTrace* trace) {
  check_fit_inputs(x, y);
  require_both_classes(y);
  cfg.validate();
  return boost(x, y, cfg, {}, "adaboost", trace);
}

std::shared_ptr<const AdaBoostModel> rusboost_fit(const Matrix& x, std::span<const int> y,
                                                  const BoostConfig& cfg, const ResampleSpec& spec,
                                                  BoostTrace* trace) {
  check_fit_inputs(x, y);
  require_both_classes(y);
  cfg.validate();
  spec.validate();
  const auto counts = class_counts(y);
  const auto keep = static_cast<std::size_t>(
      std::llround(static_cast<double>(counts.minority) / spec.target_ratio));
  if (keep > counts.majority) {
    throw Error(ErrorCode::InvalidRatio, "rusboost target ratio needs " + std::to_string(keep) +
                                             " majority rows but only " +
                                             std::to_string(counts.majority) + " exist");
  }
  std::vector<std::size_t> minority;
  std::vector<std::size_t> majority;
  for (std::size_t i = 0; i < y.size(); ++i) {
    (y[i] == counts.minority_label ? minority : majority).push_back(i);
  }

  Rng rng(derive_seed(cfg.seed, spec.seed));
  std::vector<std::pair<double, std::size_t>> keys(majority.size());
  // Weighted sampling without replacement: keep the largest log(u) / w keys.
  SubsetDraw draw = [&](std::span<const double> w) {
    for (std::size_t j = 0; j < majority.size(); ++j) {
      double u = rng.uniform();
      while (u <= 0.0) u = rng.uniform();
      keys[j] = {std::log(u) / w[majority[j]], majority[j]};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<long>(keep), keys.end(),
                      [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    std::vector<std::size_t> subset = minority;
    for (std::size_t j = 0; j < keep; ++j) subset.push_back(keys[j].second);
    std::sort(subset.begin(), subset.end());
    return subset;
  };
  return boost(x, y, cfg, draw, "rusboost", trace);
}

std::vector<double> EasyEnsembleModel::score(const Matrix& x) const {
  check_score_inputs(n_features_, x);
  std::vector<double> out(x.rows(), 0.0);
  for (const auto& m : members_) {
    const auto s = m.score(x);
    for (std::size_t i = 0; i < s.size(); ++i) out[i] += s[i];
  }
  for (auto& v : out) v /= static_cast<double>(members_.size());
  return out;
}

nlohmann::json EasyEnsembleModel::params() const {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : members_) members.push_back(m.params());
  return {{"n_features", n_features_}, {"members", members}};
}

std::shared_ptr<const EasyEnsembleModel> EasyEnsembleModel::from_params(const nlohmann::json& p) {
  std::vector<AdaBoostModel> members;
  for (const auto& m : p.at("members")) members.push_back(*AdaBoostModel::from_params(m));
  if (members.empty()) throw Error(ErrorCode::ParseError, "easy ensemble without members");
  return std::make_shared<EasyEnsembleModel>(std::move(members), p.at("n_features").get<std::size_t>());
}

std::shared_ptr<const EasyEnsembleModel> easy_ensemble_fit(const Matrix& x, std::span<const int> y,
                                                           int n_subsets, const BoostConfig& cfg,
                                                           std::uint64_t seed,
                                                           EasyEnsembleTrace* trace) {
  check_fit_inputs(x, y);
  require_both_classes(y);
  cfg.validate();
  if (n_subsets <= 0) throw Error(ErrorCode::InvalidConfig, "easy ensemble n_subsets must be positive");
  std::vector<AdaBoostModel> members;
  for (int s = 0; s < n_subsets; ++s) {
    ResampleSpec spec{.method = ResampleMethod::rus,
                      .target_ratio = 1.0,
                      .seed = derive_seed(seed, static_cast<std::uint64_t>(s))};
    const auto subset = random_undersample(x, y, spec);
    if (trace) trace->member_classes.push_back(class_counts(subset.y));
    BoostConfig member_cfg = cfg;
    member_cfg.seed = derive_seed(spec.seed, "adaboost");
    members.push_back(*adaboost_fit(subset.x, subset.y, member_cfg));
  }
  return std::make_shared<EasyEnsembleModel>(std::move(members), x.cols());
}

}  // namespace screenml
