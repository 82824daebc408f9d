#include <benchmark/benchmark.h>

#include <vector>

#include "empdet/rng.hpp"
#include "empdet/svm.hpp"

namespace {

void make_blobs(std::size_t n, std::size_t dim, std::vector<std::vector<double>>& X,
                std::vector<int>& y) {
  empdet::Rng rng(42);
  X.assign(n, std::vector<double>(dim));
  y.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    bool pos = i % 5 == 0;
    y[i] = pos ? 1 : -1;
    for (auto& v : X[i]) v = rng.normal() + (pos ? 1.0 : -1.0);
  }
}

void BM_SmoTrain(benchmark::State& state) {
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  make_blobs(static_cast<std::size_t>(state.range(0)), 20, X, y);
  for (auto _ : state) {
    auto result = empdet::train_svm_full(X, y, 1.0, 0.05, 3.0);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_SmoTrain)->Arg(200)->Arg(500);

void BM_Decision(benchmark::State& state) {
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  make_blobs(400, 20, X, y);
  auto result = empdet::train_svm_full(X, y, 1.0, 0.05, 3.0);
  for (auto _ : state) {
    double acc = 0.0;
    for (const auto& x : X) acc += result.model.decision(x);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * X.size());
}
BENCHMARK(BM_Decision);

}  // namespace
