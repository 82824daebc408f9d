#pragma once

#include <span>
#include <string>
#include <vector>

namespace empdet {

struct WavData {
  int sample_rate = 0;
  std::vector<float> samples;  // mono, [-1, 1)
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// PCM16 mono WAV only; anything else is an input error.
WavData read_wav(const std::string& path);
void write_wav(const std::string& path, std::span<const float> samples, int sample_rate);

// Header-only read; avoids pulling the sample data just for EDR's
// total-duration denominator.
double wav_duration_s(const std::string& path);

}  // namespace empdet
