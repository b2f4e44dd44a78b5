#include <gtest/gtest.h>

#include "screenml/ensemble.hpp"
#include "screenml/metrics.hpp"
#include "screenml/tree.hpp"
#include "support/memorizer.hpp"
#include "support/test_support.hpp"

using namespace screenml;
using screenml::testing::random_matrix;

namespace {

class Constant final : public Model {
 public:
  explicit Constant(double v) : v_(v) {}
  std::string_view kind() const override { return "constant"; }
  std::size_t n_features() const override { return 1; }
  std::vector<double> score(const Matrix& x) const override { return std::vector<double>(x.rows(), v_); }
  nlohmann::json params() const override { return {{"value", v_}}; }

 private:
  double v_;
};

FittedModel constant(double v) { return std::make_shared<const Constant>(v); }

Learner logreg_learner() {
  return [](const Matrix& x, std::span<const int> y, std::uint64_t) -> FittedModel { return logreg_fit(x, y); };
}

Learner tree_learner() {
  return [](const Matrix& x, std::span<const int> y, std::uint64_t) -> FittedModel {
    return tree_fit(x, y, {.max_depth = 3});
  };
}

}  // namespace

TEST(SoftVote, Mean) {
  const Matrix x(3, 1);
  const std::vector<FittedModel> two{constant(0.2), constant(0.8)};
  for (double s : soft_vote(two, x)) EXPECT_DOUBLE_EQ(s, 0.5);
  const std::vector<FittedModel> one{constant(0.3)};
  EXPECT_EQ(soft_vote(one, x), std::vector<double>(3, 0.3));
  const std::vector<FittedModel> same{constant(0.7), constant(0.7), constant(0.7)};
  for (double s : soft_vote(same, x)) EXPECT_DOUBLE_EQ(s, 0.7);
}

TEST(SoftVote, EmptyModelList) {
  try {
    soft_vote({}, Matrix(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyModelList);
  }
  EXPECT_THROW(VotingModel({}), Error);
}

TEST(SoftVote, WithinMemberRange) {
  Rng rng(1);
  const auto x = random_matrix(100, 3, rng);
  const auto y = screenml::testing::linear_labels(x, rng);
  const std::vector<FittedModel> members{logreg_fit(x, y), tree_fit(x, y, {.max_depth = 2})};
  const VotingModel vote(members);
  const auto s = vote.score(x);
  const auto a = members[0]->score(x);
  const auto b = members[1]->score(x);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_GE(s[i], std::min(a[i], b[i]) - 1e-15);
    EXPECT_LE(s[i], std::max(a[i], b[i]) + 1e-15);
  }
}

TEST(Stacking, ShapeRangeAndDeterminism) {
  Rng rng(2);
  const auto x = random_matrix(120, 4, rng);
  const auto y = screenml::testing::linear_labels(x, rng);
  const std::vector<Learner> bases{logreg_learner(), tree_learner()};
  const auto fit = stacking_fit(x, y, bases, {}, 5, 9);
  EXPECT_EQ(fit.oof.rows(), 120u);
  EXPECT_EQ(fit.oof.cols(), 2u);
  for (double s : fit.model->score(x)) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  const auto again = stacking_fit(x, y, bases, {}, 5, 9);
  EXPECT_EQ(again.model->meta().weights(), fit.model->meta().weights());
  EXPECT_EQ(again.model->meta().bias(), fit.model->meta().bias());
  EXPECT_EQ(again.oof, fit.oof);
}

TEST(Stacking, OutOfFoldColumnsComeFromOtherFolds) {
  Rng rng(3);
  const auto x = random_matrix(60, 2, rng);
  const auto y = screenml::testing::random_labels(60, 0.5, rng);
  const std::vector<Learner> bases{screenml::testing::fit_memorizer};
  const auto fit = stacking_fit(x, y, bases, {}, 4, 1);
  // A memorizer only knows its training rows, so every OOF value is a fold prior, never a label.
  for (std::size_t r = 0; r < x.rows(); ++r) {
    EXPECT_GT(fit.oof(r, 0), 0.0);
    EXPECT_LT(fit.oof(r, 0), 1.0);
  }
}

TEST(Stacking, MemorizerCarriesNoHeldOutSignal) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto x = random_matrix(200, 3, rng);
    auto y = screenml::testing::random_labels(200, 0.4, rng);
    rng.shuffle(std::span<int>(y));
    const std::vector<Learner> bases{screenml::testing::fit_memorizer};
    const auto fit = stacking_fit(x, y, bases, {}, 5, seed);
    for (int fold = 0; fold < 5; ++fold) {
      const auto test = fit.plan.test_indices(fold);
      std::vector<double> col;
      for (auto i : test) col.push_back(fit.oof(i, 0));
      EXPECT_LE(roc_auc(select(y, test), col), 0.55) << seed << "/" << fold;
    }
  }
}

TEST(Stacking, Errors) {
  const std::vector<Learner> bases{logreg_learner()};
  Matrix x(4, 1);
  try {
    stacking_fit(x, Labels{1, 1, 1, 1}, bases, {}, 2, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
  try {
    stacking_fit(x, Labels{1, 0, 1, 0}, bases, {}, 5, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewRows);
  }
}
