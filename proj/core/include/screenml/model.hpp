#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenml/matrix.hpp"

namespace screenml {

/// A trained binary classifier. Immutable after fitting; safe to share for scoring.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string_view kind() const = 0;
  virtual std::size_t n_features() const = 0;
  /// One probability-like score in [0, 1] per row of x.
  virtual std::vector<double> score(const Matrix& x) const = 0;
  /// Learned parameters, enough to rebuild the model with model_from_json.
  virtual nlohmann::json params() const = 0;
};

using FittedModel = std::shared_ptr<const Model>;

/// Uniform fit contract: (X, y, seed) -> FittedModel, deterministic per seed.
using Learner =
    std::function<FittedModel(const Matrix& x, std::span<const int> y, std::uint64_t seed)>;

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Mean binary cross-entropy of logit z against label y, computed without overflow.
inline double logistic_loss(double z, int y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

/// Throws EmptyInput / DimensionMismatch / ParseError for malformed training inputs.
void check_fit_inputs(const Matrix& x, std::span<const int> y);
void check_score_inputs(std::size_t expected_features, const Matrix& x);
/// Throws SingleClass unless both labels occur.
void require_both_classes(std::span<const int> y);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

}  // namespace screenml
