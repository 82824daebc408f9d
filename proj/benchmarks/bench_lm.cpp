#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "empdet/ngram_lm.hpp"
#include "empdet/rng.hpp"

namespace {

std::vector<std::vector<std::string>> make_corpus(std::size_t n_sentences,
                                                  std::uint64_t seed) {
  empdet::Rng rng(seed);
  std::vector<std::vector<std::string>> corpus(n_sentences);
  for (auto& sent : corpus) {
    std::size_t len = 5 + rng.below(10);
    for (std::size_t i = 0; i < len; ++i) {
      sent.push_back("w" + std::to_string(rng.below(200)));
    }
  }
  return corpus;
}

void BM_TrainTrigram(benchmark::State& state) {
  auto corpus = make_corpus(400, 7);
  for (auto _ : state) {
    auto lm = empdet::train_ngram(corpus, 3);
    benchmark::DoNotOptimize(lm);
  }
}
BENCHMARK(BM_TrainTrigram);

void BM_Perplexity(benchmark::State& state) {
  auto corpus = make_corpus(400, 7);
  auto lm = empdet::train_ngram(corpus, 3);
  auto eval = make_corpus(50, 11);
  for (auto _ : state) {
    double ppl = empdet::perplexity(*lm, eval);
    benchmark::DoNotOptimize(ppl);
  }
}
BENCHMARK(BM_Perplexity);

}  // namespace
