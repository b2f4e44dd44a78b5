#pragma once

#include "screenml/resample.hpp"
#include "screenml/tree.hpp"

namespace screenml {

struct BoostConfig {
  int n_estimators = 50;
  TreeConfig base_tree{.max_depth = 1};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Smallest weighted error used when a weak learner is perfect.
inline constexpr double kMinBoostError = 1e-10;

/// Stage weight 0.5 * ln((1 - e) / e), with e clamped to kMinBoostError.
double stage_weight(double weighted_error);

/// Discrete binary AdaBoost ensemble; score = sigmoid(sum_t alpha_t * h_t(x)), h_t in {-1, +1}.
class AdaBoostModel final : public Model {
 public:
  struct Stage {
    DecisionTree learner;
    double alpha = 0.0;
  };

  AdaBoostModel(std::vector<Stage> stages, std::size_t n_features, std::string kind = "adaboost")
      : stages_(std::move(stages)), n_features_(n_features), kind_(std::move(kind)) {}

  std::string_view kind() const override { return kind_; }
  std::size_t n_features() const override { return n_features_; }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;
  static std::shared_ptr<const AdaBoostModel> from_params(const nlohmann::json& p,
                                                          std::string kind = "adaboost");

  std::vector<double> margin(const Matrix& x) const;
  const std::vector<Stage>& stages() const noexcept { return stages_; }

 private:
  std::vector<Stage> stages_;
  std::size_t n_features_;
  std::string kind_;
};

/// Per-round diagnostics, recorded when a trace is requested.
struct BoostTrace {
  std::vector<double> weighted_errors;
  std::vector<double> weight_sums;          // after normalisation
  std::vector<double> training_errors;      // unweighted, of the ensemble so far
  std::vector<ClassCounts> learner_classes;  // class sizes each weak learner saw
  int redraws = 0;
};

std::shared_ptr<const AdaBoostModel> adaboost_fit(const Matrix& x, std::span<const int> y,
                                                  const BoostConfig& cfg,
                                                  BoostTrace* trace = nullptr);

/// AdaBoost whose weak learner each round sees every minority row plus a
/// majority sample drawn without replacement in proportion to the current weights.
std::shared_ptr<const AdaBoostModel> rusboost_fit(const Matrix& x, std::span<const int> y,
                                                  const BoostConfig& cfg,
                                                  const ResampleSpec& spec,
                                                  BoostTrace* trace = nullptr);

class EasyEnsembleModel final : public Model {
 public:
  EasyEnsembleModel(std::vector<AdaBoostModel> members, std::size_t n_features)
      : members_(std::move(members)), n_features_(n_features) {}

  std::string_view kind() const override { return "easy_ensemble"; }
  std::size_t n_features() const override { return n_features_; }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;
  static std::shared_ptr<const EasyEnsembleModel> from_params(const nlohmann::json& p);

  const std::vector<AdaBoostModel>& members() const noexcept { return members_; }

 private:
  std::vector<AdaBoostModel> members_;
  std::size_t n_features_;
};

struct EasyEnsembleTrace {
  std::vector<ClassCounts> member_classes;
};

/// One AdaBoost per balanced random undersample; score = mean member score.
std::shared_ptr<const EasyEnsembleModel> easy_ensemble_fit(const Matrix& x, std::span<const int> y,
                                                           int n_subsets, const BoostConfig& cfg,
                                                           std::uint64_t seed,
                                                           EasyEnsembleTrace* trace = nullptr);

}  // namespace screenml
