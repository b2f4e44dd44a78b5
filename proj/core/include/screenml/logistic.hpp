#pragma once

#include "screenml/model.hpp"

namespace screenml {

struct LogRegConfig {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 0.0;

  void validate() const;
};

class LogisticRegression final : public Model {
 public:
  LogisticRegression(std::vector<double> weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}

  std::string_view kind() const override { return "logreg"; }
  std::size_t n_features() const override { return weights_.size(); }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;
  static std::shared_ptr<const LogisticRegression> from_params(const nlohmann::json& p);

  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }

 private:
  std::vector<double> weights_;
  double bias_;
};

/// Mean cross-entropy + (l2/2)|w|^2 and its gradient.
/// `params` holds the weights followed by the bias.
LossGradient logreg_objective(std::span<const double> params, const Matrix& x,
                              std::span<const int> y, double l2);

/// Full-batch gradient descent from zero initialisation.
std::shared_ptr<const LogisticRegression> logreg_fit(const Matrix& x, std::span<const int> y,
                                                     const LogRegConfig& cfg = {});

}  // namespace screenml
