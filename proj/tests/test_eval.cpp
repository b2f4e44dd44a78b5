#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "screenml/logistic.hpp"
#include "screenml/metrics.hpp"
#include "screenml/model_spec.hpp"
#include "screenml/tree.hpp"
#include "screenml/validation.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

using namespace screenml;
using screenml::testing::random_matrix;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

Learner tree_learner(std::optional<int> depth = std::nullopt) {
  return [depth](const Matrix& x, std::span<const int> y, std::uint64_t) -> FittedModel {
    return tree_fit(x, y, {.max_depth = depth});
  };
}

}  // namespace

TEST(Threshold, InclusiveRule) {
  const std::vector<double> s{0.2, 0.5, 0.6};
  EXPECT_EQ(apply_threshold(s, 0.5), (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(apply_threshold(s, 0.0), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(apply_threshold(s, std::nextafter(0.6, 1.0)), (std::vector<int>{0, 0, 0}));
}

TEST(Confusion, Counts) {
  const Labels y{1, 1, 0, 0};
  EXPECT_EQ(confusion(y, std::vector<int>{1, 0, 1, 0}), (ConfusionMatrix{1, 1, 1, 1}));
  const auto same = confusion(y, y);
  EXPECT_EQ(same.fp, 0u);
  EXPECT_EQ(same.fn, 0u);
  EXPECT_EQ(confusion({}, {}), ConfusionMatrix{});
  EXPECT_EQ(code_of([] { confusion(std::vector<int>{1}, std::vector<int>{}); }), ErrorCode::LengthMismatch);
}

TEST(Metrics, FormulasAndZeroDivision) {
  const ConfusionMatrix cm{6, 2, 3, 9};
  EXPECT_DOUBLE_EQ(precision(cm), 6.0 / 8.0);
  EXPECT_DOUBLE_EQ(recall(cm), 6.0 / 9.0);
  EXPECT_DOUBLE_EQ(accuracy(cm), 15.0 / 20.0);
  EXPECT_DOUBLE_EQ(f1(cm), 2 * 0.75 * (2.0 / 3.0) / (0.75 + 2.0 / 3.0));
  const ConfusionMatrix none{0, 0, 4, 6};
  EXPECT_EQ(precision(none), 0.0);
  EXPECT_EQ(recall(none), 0.0);
  EXPECT_EQ(f1(none), 0.0);
  EXPECT_EQ(accuracy(ConfusionMatrix{}), 0.0);
}

TEST(Metrics, PublishedPrecisionRecallPairs) {
  EXPECT_NEAR(f1(0.5704, 0.9927), 0.7245, 0.0005);
  EXPECT_NEAR(f1(0.72, 0.96), 0.82, 0.01);
  EXPECT_NEAR(f1(0.72, 0.96), 0.823, 0.0005);
}

TEST(Metrics, F1IdentityOnRandomMatrices) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const ConfusionMatrix cm{rng.index(50) + 1, rng.index(50), rng.index(50), rng.index(50)};
    const double p = precision(cm);
    const double r = recall(cm);
    EXPECT_NEAR(f1(cm), 2 * p * r / (p + r), 1e-15);
  }
}

TEST(Roc, HandBuiltCurve) {
  const auto c = roc_curve(std::vector<int>{1, 0}, std::vector<double>{0.9, 0.1});
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_EQ(c.points[0].fpr, 0.0);
  EXPECT_EQ(c.points[0].tpr, 0.0);
  EXPECT_TRUE(std::isinf(c.points[0].threshold));
  EXPECT_EQ(c.points[1].fpr, 0.0);
  EXPECT_EQ(c.points[1].tpr, 1.0);
  EXPECT_EQ(c.points[2].fpr, 1.0);
  EXPECT_EQ(c.points[2].tpr, 1.0);
}

TEST(Roc, PerfectAndTiedScores) {
  const Labels y{0, 1, 1, 0, 1};
  std::vector<double> s(y.begin(), y.end());
  const auto perfect = roc_curve(y, s);
  bool corner = false;
  for (const auto& p : perfect.points) corner |= p.fpr == 0.0 && p.tpr == 1.0;
  EXPECT_TRUE(corner);
  EXPECT_DOUBLE_EQ(auc(perfect), 1.0);

  const auto tied = roc_curve(y, std::vector<double>(5, 0.4));
  ASSERT_EQ(tied.points.size(), 2u);
  EXPECT_DOUBLE_EQ(auc(tied), 0.5);
}

TEST(Roc, SingleClass) {
  EXPECT_EQ(code_of([] { roc_curve(std::vector<int>{1, 1}, std::vector<double>{0.1, 0.2}); }),
            ErrorCode::SingleClass);
}

TEST(Roc, CurveInvariantsAndCsv) {
  Rng rng(4);
  const auto y = screenml::testing::random_labels(80, 0.3, rng);
  std::vector<double> s(80);
  for (auto& v : s) v = std::round(rng.uniform() * 20) / 20;
  const auto c = roc_curve(y, s);
  EXPECT_EQ(c.points.front().fpr, 0.0);
  EXPECT_EQ(c.points.front().tpr, 0.0);
  EXPECT_EQ(c.points.back().fpr, 1.0);
  EXPECT_EQ(c.points.back().tpr, 1.0);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    EXPECT_GE(c.points[i].fpr, c.points[i - 1].fpr);
    EXPECT_GE(c.points[i].tpr, c.points[i - 1].tpr);
    EXPECT_LT(c.points[i].threshold, c.points[i - 1].threshold);
  }
  const auto text = c.to_csv();
  EXPECT_EQ(text.substr(0, text.find('\n')), "threshold,fpr,tpr");
  EXPECT_EQ(text.substr(text.find('\n') + 1, 8), "inf,0,0\n");
}

TEST(Auc, MatchesPairCountingOracle) {
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(49);
    const auto y = screenml::testing::random_labels(n, 0.1 + 0.8 * rng.uniform(), rng);
    std::vector<double> s(n);
    const bool coarse = trial % 2 == 0;
    for (auto& v : s) v = coarse ? static_cast<double>(rng.index(5)) / 4.0 : rng.uniform();
    EXPECT_NEAR(roc_auc(y, s), screenml::testing::pair_counting_auc(y, s), 1e-12) << trial;
  }
}

TEST(Auc, InvariantUnderMonotoneTransform) {
  Rng rng(2);
  const auto y = screenml::testing::random_labels(60, 0.4, rng);
  std::vector<double> s(60);
  std::vector<double> cubed(60);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform();
    cubed[i] = s[i] * s[i] * s[i];
  }
  EXPECT_NEAR(roc_auc(y, s), roc_auc(y, cubed), 1e-15);
}

TEST(Sweep, RecallNonIncreasingAndBaseRate) {
  Rng rng(3);
  const auto y = screenml::testing::random_labels(300, 0.35, rng);
  std::vector<double> s(300);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::clamp(0.3 * y[i] + 0.7 * rng.uniform(), 0.0, 1.0);
  auto grid = default_threshold_grid();
  grid.insert(grid.begin(), 0.0);
  const auto sweep = sweep_thresholds(y, s, grid, ThresholdObjective::max_f1());
  ASSERT_EQ(sweep.rows.size(), 20u);
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) EXPECT_LE(sweep.rows[i].recall, sweep.rows[i - 1].recall);
  double base = 0;
  for (int v : y) base += v;
  EXPECT_DOUBLE_EQ(sweep.rows[0].accuracy, base / y.size());
  for (const auto& r : sweep.rows) {
    if (r.precision + r.recall > 0) EXPECT_NEAR(r.f1, 2 * r.precision * r.recall / (r.precision + r.recall), 1e-15);
  }
}

TEST(Sweep, DefaultGrid) {
  const auto g = default_threshold_grid();
  ASSERT_EQ(g.size(), 19u);
  EXPECT_DOUBLE_EQ(g.front(), 0.05);
  EXPECT_DOUBLE_EQ(g.back(), 0.95);
  EXPECT_DOUBLE_EQ(g[5], 0.3);
}

TEST(Sweep, SingletonAndEmptyGrid) {
  const Labels y{1, 0, 1};
  const std::vector<double> s{0.9, 0.2, 0.4};
  const std::vector<double> one{0.3};
  EXPECT_EQ(sweep_thresholds(y, s, one, ThresholdObjective::max_f1()).best_threshold, 0.3);
  EXPECT_EQ(code_of([&] { sweep_thresholds(y, s, {}, ThresholdObjective::max_f1()); }), ErrorCode::EmptyGrid);
  const std::vector<double> bad{1.5};
  EXPECT_EQ(code_of([&] { sweep_thresholds(y, s, bad, ThresholdObjective::max_f1()); }), ErrorCode::InvalidConfig);
}

TEST(Sweep, TiesGoToLowestThreshold) {
  const Labels y{1, 0};
  const std::vector<double> s{0.9, 0.1};
  const std::vector<double> grid{0.7, 0.2, 0.5};
  const auto sweep = sweep_thresholds(y, s, grid, ThresholdObjective::max_f1());
  EXPECT_EQ(sweep.best_threshold, 0.2);
  EXPECT_EQ(sweep.rows.front().threshold, 0.2);
}

TEST(Sweep, PrecisionFloorAndFallback) {
  const Labels y{1, 1, 0, 0, 1, 0};
  const std::vector<double> s{0.9, 0.6, 0.7, 0.4, 0.3, 0.2};
  const std::vector<double> grid{0.1, 0.25, 0.5, 0.65, 0.8};
  const auto floor = sweep_thresholds(y, s, grid, ThresholdObjective::recall_with_precision_floor(0.6));
  EXPECT_FALSE(floor.fallback);
  EXPECT_EQ(floor.best_threshold, 0.25);  // precision 3/5, recall 1

  // Scores that never separate positives above 0.9 precision.
  const Labels y2{1, 0, 1, 0};
  const std::vector<double> s2{0.8, 0.9, 0.3, 0.35};
  const auto fb = sweep_thresholds(y2, s2, grid, ThresholdObjective::recall_with_precision_floor(0.9));
  EXPECT_TRUE(fb.fallback);
  double best_precision = 0;
  for (const auto& r : fb.rows) best_precision = std::max(best_precision, r.precision);
  EXPECT_EQ(fb.rows[fb.best_index].precision, best_precision);
}

TEST(Sweep, ObjectiveText) {
  EXPECT_EQ(ThresholdObjective::parse("max_f1").kind, ThresholdObjective::Kind::max_f1);
  const auto o = ThresholdObjective::parse("max_recall_with_precision_floor:0.7");
  EXPECT_EQ(o.precision_floor, 0.7);
  EXPECT_EQ(ThresholdObjective::parse(o.describe()).precision_floor, 0.7);
  EXPECT_THROW(ThresholdObjective::parse("max_auc"), Error);
}

TEST(KFold, RoundRobinArithmetic) {
  const Labels y{1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  const auto plan = stratified_kfold(y, 5, 3);
  for (int f = 0; f < 5; ++f) {
    const auto test = plan.test_indices(f);
    ASSERT_EQ(test.size(), 2u);
    EXPECT_EQ(y[test[0]] + y[test[1]], 1);
  }
  EXPECT_EQ(stratified_kfold(y, 5, 3).fold_of, plan.fold_of);
  EXPECT_EQ(code_of([&] { stratified_kfold(y, 6, 3); }), ErrorCode::TooFewPerClass);
}

TEST(KFold, PartitionAndProportions) {
  Rng rng(6);
  const auto y = screenml::testing::random_labels(173, 0.3, rng);
  const auto plan = stratified_kfold(y, 5, 1);
  std::vector<int> seen(y.size(), 0);
  double pos = 0;
  for (int v : y) pos += v;
  for (int f = 0; f < 5; ++f) {
    const auto test = plan.test_indices(f);
    const auto train = plan.train_indices(f);
    EXPECT_EQ(test.size() + train.size(), y.size());
    double fold_pos = 0;
    for (auto i : test) {
      ++seen[i];
      fold_pos += y[i];
    }
    EXPECT_LE(std::abs(fold_pos - pos * test.size() / y.size()), 1.0);
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(CrossValidate, ShapeDeterminismAndAggregates) {
  Rng rng(7);
  const auto x = random_matrix(150, 3, rng);
  const auto y = screenml::testing::linear_labels(x, rng);
  const auto plan = stratified_kfold(y, 4, 2);
  const auto a = cross_validate(tree_learner(3), x, y, plan, {}, 5);
  const auto b = cross_validate(tree_learner(3), x, y, plan, {}, 5);
  ASSERT_EQ(a.folds.size(), 4u);
  double sum = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.folds[i].f1, b.folds[i].f1);
    EXPECT_EQ(a.folds[i].auc, b.folds[i].auc);
    sum += a.folds[i].f1;
  }
  EXPECT_NEAR(a.mean.f1, sum / 4, 1e-15);
  double ss = 0;
  for (const auto& f : a.folds) ss += (f.f1 - a.mean.f1) * (f.f1 - a.mean.f1);
  EXPECT_NEAR(a.sd.f1, std::sqrt(ss / 3), 1e-15);
}

TEST(CrossValidate, ResamplerNeverSeesHeldOutRows) {
  Rng rng(8);
  const auto x = random_matrix(120, 3, rng);
  auto y = screenml::testing::random_labels(120, 0.2, rng);
  const auto plan = stratified_kfold(y, 5, 2);
  int calls = 0;
  const ResampleSpec smote{.method = ResampleMethod::smote, .seed = 1};
  cross_validate(tree_learner(2), x, y, plan, smote, 5, [&](int fold, std::span<const std::size_t> rows) {
    ++calls;
    for (auto r : rows) EXPECT_NE(plan.fold_of[r], fold);
    EXPECT_EQ(rows.size(), plan.train_indices(fold).size());
  });
  EXPECT_EQ(calls, 5);
}

TEST(CrossValidate, InjectedLeakInflatesAuc) {
  Rng rng(9);
  const auto x = random_matrix(300, 4, rng);
  const auto y = screenml::testing::linear_labels(x, rng, 3.0);
  const auto plan = stratified_kfold(y, 5, 4);
  const auto correct = cross_validate(tree_learner(), x, y, plan, {}, 1);

  // Same loop, but each fold's test rows are copied into training.
  double leaky = 0.0;
  for (int fold = 0; fold < 5; ++fold) {
    auto train = plan.train_indices(fold);
    const auto test = plan.test_indices(fold);
    train.insert(train.end(), test.begin(), test.end());
    const auto m = tree_learner()(x.select_rows(train), select(y, train), 1);
    leaky += roc_auc(select(y, test), m->score(x.select_rows(test))) / 5.0;
  }
  EXPECT_GT(leaky, correct.mean.auc + 0.2);
  EXPECT_GT(leaky, 0.99);
}

TEST(GridSearch, ExpandOrderAndSetParam) {
  nlohmann::json cfg = {{"kind", "gbt"}};
  set_param(cfg, "tree.max_depth", 3);
  EXPECT_EQ(cfg["tree"]["max_depth"], 3);
  const ParamGrid grid{{"b", {1, 2}}, {"a", {"x", "y", "z"}}};
  const auto configs = expand_grid({{"kind", "k"}}, grid);
  ASSERT_EQ(configs.size(), 6u);
  EXPECT_EQ(configs[0]["a"], "x");
  EXPECT_EQ(configs[0]["b"], 1);
  EXPECT_EQ(configs[1]["a"], "x");
  EXPECT_EQ(configs[1]["b"], 2);
  EXPECT_EQ(configs[5]["a"], "z");
  EXPECT_THROW(expand_grid({}, ParamGrid{{"a", {}}}), Error);
}

TEST(GridSearch, SelectsDominantConfigAndReportsAllRows) {
  Rng rng(10);
  const auto x = random_matrix(200, 3, rng);
  const auto y = screenml::testing::linear_labels(x, rng, 0.2);
  const auto plan = stratified_kfold(y, 4, 3);
  const LearnerFactory factory = [](const nlohmann::json& c) { return make_learner(ModelSpec::from_json(c)); };

  // Depth-0 trees cannot split, so depth 4 dominates on every fold.
  const auto gs = grid_search({{"kind", "tree"}}, ParamGrid{{"max_depth", {0, 4}}}, [&](const nlohmann::json& c) {
    if (c["max_depth"] == 0) {
      return Learner([](const Matrix& xx, std::span<const int> yy, std::uint64_t) -> FittedModel {
        double p = 0;
        for (int v : yy) p += v;
        return std::make_shared<const LogisticRegression>(std::vector<double>(xx.cols(), 0.0),
                                                         std::log(p / (yy.size() - p)));
      });
    }
    return factory(c);
  }, x, y, plan, {}, 1);
  ASSERT_EQ(gs.rows.size(), 2u);
  EXPECT_EQ(gs.best_index, 1u);
  for (std::size_t f = 0; f < 4; ++f) EXPECT_GT(gs.rows[1].cv.folds[f].f1, gs.rows[0].cv.folds[f].f1);

  const auto one = grid_search({{"kind", "logreg"}}, ParamGrid{{"epochs", {50}}}, factory, x, y, plan, {}, 1);
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_EQ(one.best_config()["epochs"], 50);

  const auto six = grid_search({{"kind", "tree"}}, ParamGrid{{"max_depth", {1, 2, 3}}, {"min_samples_leaf", {1, 5}}},
                               factory, x, y, plan, {}, 1);
  EXPECT_EQ(six.rows.size(), 6u);

  EXPECT_EQ(code_of([&] { grid_search({{"kind", "tree"}}, {}, factory, x, y, plan, {}, 1); }), ErrorCode::EmptyGrid);
}

TEST(GridSearch, TiesKeepFirstConfig) {
  Rng rng(11);
  const auto x = random_matrix(80, 2, rng);
  const auto y = screenml::testing::linear_labels(x, rng);
  const auto plan = stratified_kfold(y, 4, 3);
  const LearnerFactory factory = [](const nlohmann::json& c) { return make_learner(ModelSpec::from_json(c)); };
  // min_samples_split 2 and 3 grow the same depth-1 stump on these folds.
  const auto gs = grid_search({{"kind", "tree"}, {"max_depth", 1}}, ParamGrid{{"min_samples_split", {2, 3}}},
                              factory, x, y, plan, {}, 1);
  ASSERT_EQ(gs.rows[0].cv.mean.f1, gs.rows[1].cv.mean.f1);
  EXPECT_EQ(gs.best_index, 0u);
}
