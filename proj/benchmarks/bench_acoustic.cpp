#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "empdet/acoustic.hpp"
#include "empdet/dsp.hpp"

namespace {

std::vector<float> make_tone(double f0, double seconds) {
  std::vector<float> samples(static_cast<std::size_t>(seconds * empdet::kSampleRate));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = 0.5f * std::sin(2.0 * M_PI * f0 * i / empdet::kSampleRate);
  }
  return samples;
}

void BM_Mfcc(benchmark::State& state) {
  auto samples = make_tone(180.0, 2.0);
  for (auto _ : state) {
    auto frames = empdet::frame_signal(samples);
    auto mfcc = empdet::compute_mfcc(frames);
    benchmark::DoNotOptimize(mfcc);
  }
  state.SetItemsProcessed(state.iterations() *
                          empdet::frame_count(samples.size()));
}
BENCHMARK(BM_Mfcc);

void BM_PitchTrack(benchmark::State& state) {
  auto samples = make_tone(180.0, 2.0);
  for (auto _ : state) {
    auto track = empdet::track_pitch(samples);
    benchmark::DoNotOptimize(track);
  }
  state.SetItemsProcessed(state.iterations() *
                          empdet::frame_count(samples.size()));
}
BENCHMARK(BM_PitchTrack);

void BM_Fft512(benchmark::State& state) {
  std::vector<double> frame(400);
  for (std::size_t i = 0; i < frame.size(); ++i) frame[i] = std::sin(0.13 * i);
  for (auto _ : state) {
    auto spec = empdet::power_spectrum(frame, 512);
    benchmark::DoNotOptimize(spec);
  }
}
BENCHMARK(BM_Fft512);

}  // namespace
