#include <benchmark/benchmark.h>

#include <vector>

#include "empdet/metrics.hpp"
#include "empdet/rng.hpp"

namespace {

void BM_AveragePrecision(benchmark::State& state) {
  empdet::Rng rng(3);
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.uniform() < 0.02 ? 1 : 0;
  }
  labels[0] = 1;  // at least one positive
  for (auto _ : state) {
    double ap = empdet::average_precision(scores, labels);
    benchmark::DoNotOptimize(ap);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_AveragePrecision)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
