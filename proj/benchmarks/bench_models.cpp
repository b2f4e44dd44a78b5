#include <benchmark/benchmark.h>

#include "screenml/gbt.hpp"
#include "screenml/mlp.hpp"
#include "screenml/random.hpp"
#include "screenml/resample.hpp"
#include "screenml/tree.hpp"

namespace {

using namespace screenml;

struct Data {
  Matrix x;
  Labels y;
};

Data make_data(std::size_t rows, std::size_t cols, double positive_rate, std::uint64_t seed) {
  Rng rng(seed);
  Data d{Matrix(rows, cols), Labels(rows)};
  for (std::size_t r = 0; r < rows; ++r) {
    d.y[r] = rng.bernoulli(positive_rate) ? 1 : 0;
    for (std::size_t c = 0; c < cols; ++c) d.x(r, c) = rng.normal() + (d.y[r] ? 0.5 : 0.0);
  }
  return d;
}

void BM_TreeFit(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)), 20, 0.35, 1);
  for (auto _ : state) benchmark::DoNotOptimize(tree_fit(d.x, d.y, {.max_depth = 8}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TreeFit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GbtFit(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)), 20, 0.35, 2);
  for (auto _ : state) benchmark::DoNotOptimize(gbt_fit(d.x, d.y, {.n_rounds = 20}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GbtFit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_MlpEpoch(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)), 20, 0.35, 3);
  MlpConfig cfg;
  cfg.hidden_layers = {64, 32};
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mlp_fit(d.x, d.y, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpEpoch)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Smote(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)), 20, 0.1, 4);
  const ResampleSpec spec{.method = ResampleMethod::smote, .seed = 1};
  for (auto _ : state) benchmark::DoNotOptimize(smote(d.x, d.y, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Smote)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
