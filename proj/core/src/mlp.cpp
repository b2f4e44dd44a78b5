#include "screenml/mlp.hpp"

#include <numeric>

#include "screenml/random.hpp"

namespace screenml {

void MlpConfig::validate() const {
  auto fail = [](const char* why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (hidden_layers.empty()) fail("mlp needs at least one hidden layer");
  for (auto h : hidden_layers) {
    if (h == 0) fail("mlp layer sizes must be positive");
  }
  if (epochs <= 0) fail("mlp epochs must be positive");
  if (batch_size == 0) fail("mlp batch_size must be positive");
  if (!(learning_rate > 0.0)) fail("mlp learning_rate must be > 0");
}

Mlp Mlp::initialize(std::size_t n_inputs, std::span<const std::size_t> hidden, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Layer> layers;
  std::size_t fan_in = n_inputs;
  auto add = [&](std::size_t fan_out) {
    Layer layer{fan_in, fan_out, std::vector<double>(fan_in * fan_out), std::vector<double>(fan_out, 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
    layers.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (auto h : hidden) add(h);
  add(1);
  return Mlp(std::move(layers));
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void Mlp::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw Error(ErrorCode::DimensionMismatch, "mlp parameter count");
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (auto& w : l.weights) w = flat[k++];
    for (auto& b : l.bias) b = flat[k++];
  }
}

namespace {

/// Activations of every layer for one sample; [0] is the input row.
struct Workspace {
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> deltas;

  explicit Workspace(const std::vector<Mlp::Layer>& layers) {
    activations.resize(layers.size() + 1);
    deltas.resize(layers.size());
    activations[0].resize(layers.front().inputs);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      activations[l + 1].resize(layers[l].outputs);
      deltas[l].resize(layers[l].outputs);
    }
  }
};

/// Returns the output logit; hidden activations are left in ws.
double forward(const std::vector<Mlp::Layer>& layers, std::span<const double> input, Workspace& ws) {
  std::copy(input.begin(), input.end(), ws.activations[0].begin());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const auto& in = ws.activations[l];
    auto& out = ws.activations[l + 1];
    const bool output_layer = l + 1 == layers.size();
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() + o * layer.inputs;
      double z = layer.bias[o];
      for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * in[i];
      out[o] = output_layer ? z : std::max(z, 0.0);
    }
  }
  return ws.activations.back()[0];
}

/// Adds d(loss)/d(params) for one sample into grad (laid out like parameters()).
void backward(const std::vector<Mlp::Layer>& layers, double output_delta, Workspace& ws,
              std::vector<std::size_t>& offsets, std::span<double> grad) {
  ws.deltas.back()[0] = output_delta;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    const auto& in = ws.activations[l];
    const auto& delta = ws.deltas[l];
    double* gw = grad.data() + offsets[l];
    double* gb = gw + layer.weights.size();
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* row = gw + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) row[i] += d * in[i];
      gb[o] += d;
    }
    if (l == 0) break;
    auto& prev = ws.deltas[l - 1];
    std::fill(prev.begin(), prev.end(), 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* w = layer.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] += d * w[i];
    }
    // ReLU derivative: zero where the unit was inactive.
    for (std::size_t i = 0; i < prev.size(); ++i) {
      if (in[i] <= 0.0) prev[i] = 0.0;
    }
  }
}

std::vector<std::size_t> layer_offsets(const std::vector<Mlp::Layer>& layers) {
  std::vector<std::size_t> offsets;
  std::size_t k = 0;
  for (const auto& l : layers) {
    offsets.push_back(k);
    k += l.weights.size() + l.bias.size();
  }
  return offsets;
}

}  // namespace

std::vector<double> Mlp::score(const Matrix& x) const {
  check_score_inputs(n_features(), x);
  Workspace ws(layers_);
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(forward(layers_, x.row(r), ws));
  return out;
}

LossGradient Mlp::loss_and_gradient(const Matrix& x, std::span<const int> y,
                                    std::span<const std::size_t> rows) const {
  check_score_inputs(n_features(), x);
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(x.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  Workspace ws(layers_);
  auto offsets = layer_offsets(layers_);
  LossGradient out;
  out.gradient.assign(parameter_count(), 0.0);
  for (auto r : rows) {
    const double z = forward(layers_, x.row(r), ws);
    out.loss += logistic_loss(z, y[r]);
    backward(layers_, sigmoid(z) - y[r], ws, offsets, out.gradient);
  }
  const double n = static_cast<double>(rows.size());
  out.loss /= n;
  for (auto& g : out.gradient) g /= n;
  return out;
}

void Mlp::train_batch(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                      double learning_rate) {
  const auto step = loss_and_gradient(x, y, rows);
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (auto& w : l.weights) w -= learning_rate * step.gradient[k++];
    for (auto& b : l.bias) b -= learning_rate * step.gradient[k++];
  }
}

nlohmann::json Mlp::params() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : layers_) {
    layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"bias", l.bias}});
  }
  return {{"layers", layers}};
}

std::shared_ptr<const Mlp> Mlp::from_params(const nlohmann::json& p) {
  std::vector<Layer> layers;
  for (const auto& j : p.at("layers")) {
    Layer l{j.at("inputs").get<std::size_t>(), j.at("outputs").get<std::size_t>(),
            j.at("weights").get<std::vector<double>>(), j.at("bias").get<std::vector<double>>()};
    if (l.weights.size() != l.inputs * l.outputs || l.bias.size() != l.outputs) {
      throw Error(ErrorCode::ParseError, "mlp layer shape mismatch");
    }
    if (!layers.empty() && layers.back().outputs != l.inputs) {
      throw Error(ErrorCode::ParseError, "mlp layers do not chain");
    }
    layers.push_back(std::move(l));
  }
  if (layers.empty() || layers.back().outputs != 1) throw Error(ErrorCode::ParseError, "mlp output layer");
  return std::make_shared<Mlp>(std::move(layers));
}

std::shared_ptr<const Mlp> mlp_fit(const Matrix& x, std::span<const int> y, const MlpConfig& cfg) {
  check_fit_inputs(x, y);
  cfg.validate();
  auto model = std::make_shared<Mlp>(Mlp::initialize(x.cols(), cfg.hidden_layers, cfg.seed));
  Rng rng(derive_seed(cfg.seed, "shuffle"));
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const auto len = std::min(cfg.batch_size, order.size() - start);
      model->train_batch(x, y, std::span(order).subspan(start, len), cfg.learning_rate);
    }
  }
  return model;
}

}  // namespace screenml
