#include <benchmark/benchmark.h>

#include "screenml/matrix.hpp"
#include "screenml/metrics.hpp"
#include "screenml/random.hpp"

namespace {

using namespace screenml;

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  Labels y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.35) ? 1 : 0;
    s[i] = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(y, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

void BM_ThresholdSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  Labels y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.35) ? 1 : 0;
    s[i] = rng.uniform();
  }
  const auto grid = default_threshold_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_thresholds(y, s, grid, ThresholdObjective::max_f1()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ThresholdSweep)->Arg(1000)->Arg(100000);

}  // namespace
