#include "screenml/gbt.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace screenml {

void GbtConfig::validate() const {
  auto fail = [](const char* why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (n_rounds <= 0) fail("gbt n_rounds must be positive");
  if (!(shrinkage > 0.0 && shrinkage <= 1.0)) fail("gbt shrinkage must lie in (0, 1]");
  if (max_depth < 1) fail("gbt max_depth must be >= 1");
  if (!(lambda >= 0.0)) fail("gbt lambda must be >= 0");
  if (!(gamma >= 0.0)) fail("gbt gamma must be >= 0");
  if (!(min_child_weight >= 0.0)) fail("gbt min_child_weight must be >= 0");
}

double leaf_weight(double grad_sum, double hess_sum, double lambda) {
  return -grad_sum / (hess_sum + lambda);
}

double split_gain(double gl, double hl, double gr, double hr, double lambda, double gamma) {
  const double g = gl + gr;
  const double h = hl + hr;
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda)) - gamma;
}

std::vector<double> GradientBoostedTrees::margin(const Matrix& x) const {
  check_score_inputs(n_features_, x);
  std::vector<double> out(x.rows(), base_margin_);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (const auto& t : trees_) out[r] += shrinkage_ * predict_nodes(t, row);
  }
  return out;
}

std::vector<double> GradientBoostedTrees::score(const Matrix& x) const {
  auto m = margin(x);
  for (auto& v : m) v = sigmoid(v);
  return m;
}

nlohmann::json GradientBoostedTrees::params() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(nodes_to_json(t));
  return {{"n_features", n_features_},
          {"base_margin", base_margin_},
          {"shrinkage", shrinkage_},
          {"trees", trees}};
}

std::shared_ptr<const GradientBoostedTrees> GradientBoostedTrees::from_params(
    const nlohmann::json& p) {
  std::vector<std::vector<TreeNode>> trees;
  for (const auto& t : p.at("trees")) trees.push_back(nodes_from_json(t));
  return std::make_shared<GradientBoostedTrees>(p.at("base_margin").get<double>(),
                                                p.at("shrinkage").get<double>(), std::move(trees),
                                                p.at("n_features").get<std::size_t>());
}

namespace {

constexpr double kGainTieTolerance = 1e-12;

class RegressionTreeBuilder {
 public:
  RegressionTreeBuilder(const Matrix& x, const std::vector<std::vector<std::size_t>>& order,
                        const GbtConfig& cfg)
      : x_(x), order_(order), cfg_(cfg), node_of_(x.rows(), 0) {}

  /// Grows one tree on (grad, hess); leaf_of receives each row's leaf node.
  std::vector<TreeNode> build(std::span<const double> grad, std::span<const double> hess,
                              std::vector<int>& leaf_of) {
    std::vector<TreeNode> nodes(1);
    std::vector<Stats> stats(1);
    std::fill(node_of_.begin(), node_of_.end(), 0);
    for (std::size_t r = 0; r < grad.size(); ++r) {
      stats[0].g += grad[r];
      stats[0].h += hess[r];
    }
    std::vector<int> open{0};
    for (int depth = 0; depth < cfg_.max_depth && !open.empty(); ++depth) {
      std::vector<Candidate> best(nodes.size());
      std::vector<char> is_open(nodes.size(), 0);
      for (int n : open) is_open[static_cast<std::size_t>(n)] = 1;

      for (std::size_t f = 0; f < x_.cols(); ++f) {
        std::vector<Scan> scan(nodes.size());
        for (auto r : order_[f]) {
          const auto node = static_cast<std::size_t>(node_of_[r]);
          if (!is_open[node]) continue;
          auto& s = scan[node];
          const double v = x_(r, f);
          if (s.started && s.last < v) consider(f, s, v, stats[node], best[node]);
          s.gl += grad[r];
          s.hl += hess[r];
          s.last = v;
          s.started = true;
        }
      }

      std::vector<int> next;
      for (int n : open) {
        const auto& b = best[static_cast<std::size_t>(n)];
        if (!b.found) continue;
        const auto left = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes.emplace_back();
        stats.push_back({b.gl, b.hl});
        stats.push_back({stats[static_cast<std::size_t>(n)].g - b.gl,
                         stats[static_cast<std::size_t>(n)].h - b.hl});
        auto& node = nodes[static_cast<std::size_t>(n)];
        node.feature = static_cast<int>(b.feature);
        node.threshold = b.threshold;
        node.left = left;
        node.right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      if (next.empty()) break;
      for (std::size_t r = 0; r < x_.rows(); ++r) {
        const auto& node = nodes[static_cast<std::size_t>(node_of_[r])];
        if (node.is_leaf()) continue;
        node_of_[r] = x_(r, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left
                                                                                     : node.right;
      }
      open = std::move(next);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].is_leaf()) nodes[i].value = leaf_weight(stats[i].g, stats[i].h, cfg_.lambda);
    }
    leaf_of = node_of_;
    return nodes;
  }

 private:
  struct Stats {
    double g = 0.0;
    double h = 0.0;
  };
  struct Scan {
    double gl = 0.0;
    double hl = 0.0;
    double last = 0.0;
    bool started = false;
  };
  struct Candidate {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
    double gl = 0.0;
    double hl = 0.0;
  };

  void consider(std::size_t f, const Scan& s, double next_value, const Stats& total,
                Candidate& best) const {
    const double hr = total.h - s.hl;
    if (s.hl < cfg_.min_child_weight || hr < cfg_.min_child_weight) return;
    const double gain = split_gain(s.gl, s.hl, total.g - s.gl, hr, cfg_.lambda, cfg_.gamma);
    if (gain <= 0.0) return;
    if (best.found && !(gain > best.gain + kGainTieTolerance)) return;
    double threshold = s.last + (next_value - s.last) / 2.0;
    if (!(threshold < next_value)) threshold = s.last;
    best = {true, f, threshold, gain, s.gl, s.hl};
  }

  const Matrix& x_;
  const std::vector<std::vector<std::size_t>>& order_;
  const GbtConfig& cfg_;
  std::vector<int> node_of_;
};

double mean_log_loss(std::span<const double> margin, std::span<const int> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < margin.size(); ++i) sum += logistic_loss(margin[i], y[i]);
  return sum / static_cast<double>(margin.size());
}

}  // namespace

std::shared_ptr<const GradientBoostedTrees> gbt_fit(const Matrix& x, std::span<const int> y,
                                                    const GbtConfig& cfg) {
  check_fit_inputs(x, y);
  require_both_classes(y);
  cfg.validate();
  const auto n = x.rows();

  std::vector<std::vector<std::size_t>> order(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& o = order[f];
    o.resize(n);
    std::iota(o.begin(), o.end(), std::size_t{0});
    std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  const double p_bar = static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) /
                       static_cast<double>(n);
  const double base = std::log(p_bar / (1.0 - p_bar));
  std::vector<double> margin(n, base);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<int> leaf_of;
  std::vector<std::vector<TreeNode>> trees;
  std::vector<double> trace{mean_log_loss(margin, y)};

  RegressionTreeBuilder builder(x, order, cfg);
  for (int round = 0; round < cfg.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }
    auto nodes = builder.build(grad, hess, leaf_of);
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += cfg.shrinkage * nodes[static_cast<std::size_t>(leaf_of[i])].value;
    }
    trees.push_back(std::move(nodes));
    trace.push_back(mean_log_loss(margin, y));
  }
  auto model = std::make_shared<GradientBoostedTrees>(base, cfg.shrinkage, std::move(trees), x.cols());
  model->set_training_loss(std::move(trace));
  return model;
}

}  // namespace screenml
