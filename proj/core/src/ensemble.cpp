#include "screenml/ensemble.hpp"

#include "screenml/error.hpp"
#include "screenml/model_spec.hpp"
#include "screenml/random.hpp"

namespace screenml {

std::vector<double> soft_vote(std::span<const FittedModel> models, const Matrix& x) {
  if (models.empty()) throw Error(ErrorCode::EmptyModelList, "soft vote needs at least one model");
  std::vector<double> out(x.rows(), 0.0);
  for (const auto& m : models) {
    const auto s = m->score(x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s[i];
  }
  for (auto& v : out) v /= static_cast<double>(models.size());
  return out;
}

VotingModel::VotingModel(std::vector<FittedModel> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error(ErrorCode::EmptyModelList, "voting needs at least one model");
}

std::vector<double> VotingModel::score(const Matrix& x) const { return soft_vote(members_, x); }

nlohmann::json VotingModel::params() const {
  auto members = nlohmann::json::array();
  for (const auto& m : members_) members.push_back(model_to_json(*m));
  return {{"members", members}};
}

StackingModel::StackingModel(std::vector<FittedModel> bases, LogisticRegression meta)
    : bases_(std::move(bases)), meta_(std::move(meta)) {
  if (bases_.empty()) throw Error(ErrorCode::EmptyModelList, "stacking needs at least one base model");
  if (meta_.n_features() != bases_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "meta model width differs from base count");
  }
}

Matrix StackingModel::meta_features(const Matrix& x) const {
  Matrix out(x.rows(), bases_.size());
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    const auto s = bases_[j]->score(x);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = s[i];
  }
  return out;
}

std::vector<double> StackingModel::score(const Matrix& x) const { return meta_.score(meta_features(x)); }

nlohmann::json StackingModel::params() const {
  auto bases = nlohmann::json::array();
  for (const auto& m : bases_) bases.push_back(model_to_json(*m));
  return {{"bases", bases}, {"meta", meta_.params()}};
}

StackingFit stacking_fit(const Matrix& x, std::span<const int> y, std::span<const Learner> bases,
                         const LogRegConfig& meta, int n_folds, std::uint64_t seed) {
  if (bases.empty()) throw Error(ErrorCode::EmptyModelList, "stacking needs at least one base model");
  check_fit_inputs(x, y);
  require_both_classes(y);
  if (n_folds < 2) throw Error(ErrorCode::InvalidConfig, "stacking needs at least 2 folds");
  if (x.rows() < static_cast<std::size_t>(n_folds)) {
    throw Error(ErrorCode::TooFewRows, "stacking needs at least n_folds rows");
  }

  StackingFit out;
  out.plan = stratified_kfold(y, n_folds, derive_seed(seed, "stacking/folds"));
  out.oof = Matrix(x.rows(), bases.size());
  for (int fold = 0; fold < n_folds; ++fold) {
    const auto train = out.plan.train_indices(fold);
    const auto test = out.plan.test_indices(fold);
    const auto x_train = x.select_rows(train);
    const auto y_train = select(y, train);
    const auto x_test = x.select_rows(test);
    for (std::size_t j = 0; j < bases.size(); ++j) {
      const auto model = bases[j](x_train, y_train,
                                  derive_seed(derive_seed(seed, j), static_cast<std::uint64_t>(fold)));
      const auto s = model->score(x_test);
      for (std::size_t i = 0; i < test.size(); ++i) out.oof(test[i], j) = s[i];
    }
  }

  const auto meta_model = logreg_fit(out.oof, y, meta);
  std::vector<FittedModel> full;
  for (std::size_t j = 0; j < bases.size(); ++j) {
    full.push_back(bases[j](x, y, derive_seed(derive_seed(seed, j), "full")));
  }
  out.model = std::make_shared<const StackingModel>(std::move(full), *meta_model);
  return out;
}

}  // namespace screenml
