#pragma once

#include "screenml/model.hpp"

namespace screenml {

struct MlpConfig {
  std::vector<std::size_t> hidden_layers{64, 32};
  int epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Fully connected network: ReLU hidden layers, one sigmoid output unit.
class Mlp final : public Model {
 public:
  struct Layer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> bias;
  };

  explicit Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {}

  /// Uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static Mlp initialize(std::size_t n_inputs, std::span<const std::size_t> hidden,
                        std::uint64_t seed);

  std::string_view kind() const override { return "mlp"; }
  std::size_t n_features() const override { return layers_.front().inputs; }
  std::vector<double> score(const Matrix& x) const override;
  nlohmann::json params() const override;
  static std::shared_ptr<const Mlp> from_params(const nlohmann::json& p);

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::size_t parameter_count() const;
  /// Layer by layer: weights then biases.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  /// Mean cross-entropy over the given rows (all rows when empty) and its gradient,
  /// laid out like parameters().
  LossGradient loss_and_gradient(const Matrix& x, std::span<const int> y,
                                 std::span<const std::size_t> rows = {}) const;

  /// One plain gradient-descent step on a mini-batch.
  void train_batch(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                   double learning_rate);

 private:
  std::vector<Layer> layers_;
};

/// Mini-batch gradient descent with a seeded shuffle every epoch.
std::shared_ptr<const Mlp> mlp_fit(const Matrix& x, std::span<const int> y, const MlpConfig& cfg);

}  // namespace screenml
