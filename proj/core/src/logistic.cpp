#include "screenml/logistic.hpp"

#include <numeric>

namespace screenml {

void LogRegConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "logreg learning_rate must be > 0");
  if (epochs <= 0) throw Error(ErrorCode::InvalidConfig, "logreg epochs must be positive");
  if (!(l2 >= 0.0)) throw Error(ErrorCode::InvalidConfig, "logreg l2 must be >= 0");
}

std::vector<double> LogisticRegression::score(const Matrix& x) const {
  check_score_inputs(weights_.size(), x);
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    out[r] = sigmoid(std::inner_product(row.begin(), row.end(), weights_.begin(), bias_));
  }
  return out;
}

nlohmann::json LogisticRegression::params() const {
  return {{"weights", weights_}, {"bias", bias_}};
}

std::shared_ptr<const LogisticRegression> LogisticRegression::from_params(const nlohmann::json& p) {
  return std::make_shared<LogisticRegression>(p.at("weights").get<std::vector<double>>(),
                                              p.at("bias").get<double>());
}

LossGradient logreg_objective(std::span<const double> params, const Matrix& x,
                              std::span<const int> y, double l2) {
  const std::size_t d = x.cols();
  if (params.size() != d + 1) throw Error(ErrorCode::DimensionMismatch, "logreg parameter size");
  const double n = static_cast<double>(x.rows());
  LossGradient out;
  out.gradient.assign(d + 1, 0.0);
  const auto w = params.first(d);
  const double b = params[d];
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    const double z = std::inner_product(row.begin(), row.end(), w.begin(), b);
    out.loss += logistic_loss(z, y[r]);
    const double residual = sigmoid(z) - y[r];
    for (std::size_t j = 0; j < d; ++j) out.gradient[j] += residual * row[j];
    out.gradient[d] += residual;
  }
  out.loss /= n;
  for (auto& g : out.gradient) g /= n;
  double norm = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    norm += w[j] * w[j];
    out.gradient[j] += l2 * w[j];
  }
  out.loss += 0.5 * l2 * norm;
  return out;
}

std::shared_ptr<const LogisticRegression> logreg_fit(const Matrix& x, std::span<const int> y,
                                                     const LogRegConfig& cfg) {
  check_fit_inputs(x, y);
  cfg.validate();
  std::vector<double> params(x.cols() + 1, 0.0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto step = logreg_objective(params, x, y, cfg.l2);
    for (std::size_t j = 0; j < params.size(); ++j) params[j] -= cfg.learning_rate * step.gradient[j];
  }
  const double bias = params.back();
  params.pop_back();
  return std::make_shared<LogisticRegression>(std::move(params), bias);
}

}  // namespace screenml
