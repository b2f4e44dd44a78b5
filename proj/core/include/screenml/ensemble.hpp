#pragma once

#include "screenml/logistic.hpp"
#include "screenml/validation.hpp"

namespace screenml {

/// Unweighted mean of member scores.
std::vector<double> soft_vote(std::span<const FittedModel> models, const Matrix& x);

class VotingModel final : public Model {
 public:
  explicit VotingModel(std::vector<FittedModel> members);

  std::string_view kind() const override { return "voting"; }
  std::size_t n_features() const override { return members_.front()->n_features(); }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;

  const std::vector<FittedModel>& members() const noexcept { return members_; }

 private:
  std::vector<FittedModel> members_;
};

class StackingModel final : public Model {
 public:
  StackingModel(std::vector<FittedModel> bases, LogisticRegression meta);

  std::string_view kind() const override { return "stacking"; }
  std::size_t n_features() const override { return bases_.front()->n_features(); }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;

  /// One column per base model.
  Matrix meta_features(const Matrix& x) const;
  const std::vector<FittedModel>& bases() const noexcept { return bases_; }
  const LogisticRegression& meta() const noexcept { return meta_; }

 private:
  std::vector<FittedModel> bases_;
  LogisticRegression meta_;
};

struct StackingFit {
  std::shared_ptr<const StackingModel> model;
  /// Out-of-fold meta-features, rows x base models.
  Matrix oof;
  CvPlan plan;
};

/// Column j of row i comes from base j trained without the fold holding i.
/// Bases are refitted on all rows for inference.
StackingFit stacking_fit(const Matrix& x, std::span<const int> y, std::span<const Learner> bases,
                         const LogRegConfig& meta, int n_folds, std::uint64_t seed);

}  // namespace screenml
