#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "empdet/corpus.hpp"
#include "empdet/ngram_lm.hpp"
#include "empdet/segmentation.hpp"

namespace empdet {

inline constexpr int kSampleRate = 16000;
inline constexpr int kFrameLen = 400;  // 25 ms
inline constexpr int kFrameHop = 160;  // 10 ms
inline constexpr int kNumMfcc = 13;    // coefficients 0..12; MFCC0 doubles as energy

// floor((N - 400) / 160) + 1 for N >= 400, else 0.
int frame_count(std::size_t n_samples);

// Pre-emphasis (0.97) over the whole signal, then 25 ms / 10 ms framing with
// a Hamming window. Each row has kFrameLen samples.
std::vector<std::vector<double>> frame_signal(std::span<const float> samples);

// 23 triangular mel filters over 0-8 kHz, log energies floored at 1e-10,
// orthonormal DCT-II, coefficients 0..12 kept.
std::vector<std::array<double, kNumMfcc>> compute_mfcc(
    const std::vector<std::vector<double>>& frames);

struct PitchTrack {
  std::vector<double> f0_hz;          // valid only where voiced
  std::vector<std::uint8_t> voiced;
};

// Normalized cross-correlation on the 2x-decimated signal, candidate lags
// spanning 60-400 Hz, slight penalty on longer lags to suppress octave
// errors, parabolic peak refinement; voiced iff the best plain correlation
// reaches 0.45. One entry per analysis frame.
PitchTrack track_pitch(std::span<const float> samples);

struct JitterShimmerTrack {
  std::vector<double> jitter;   // valid only where voiced
  std::vector<double> shimmer;
};

// Per voiced frame: walk waveform peaks from the frame start at the tracked
// period (up to 8 peaks, extending past the frame end if the signal allows),
// then local jitter = mean |T_i - T_{i-1}| / mean T over consecutive periods
// and local shimmer likewise over peak amplitudes. Fewer than 3 full periods
// -> both features 0.
JitterShimmerTrack jitter_shimmer(std::span<const float> samples, const PitchTrack& pitch);

// max, min, mean, median, population std, skewness, excess kurtosis.
// Zero-variance series: std = skew = kurt = 0. Empty input: all zeros.
std::array<double, 7> stats7(std::span<const double> xs);

struct FrameSeries {
  int n_frames = 0;
  std::vector<std::array<double, kNumMfcc>> mfcc;
  std::vector<double> log_pitch;             // ln f0, voiced frames only
  std::vector<std::uint8_t> voiced;
  std::vector<double> jitter;
  std::vector<double> shimmer;
  std::vector<std::int32_t> speaker;         // index into speaker_ids; -1 = no utterance
  std::vector<std::string> speaker_ids;
  double frame_center_s(int i) const { return i * 0.010 + 0.0125; }
};

// Full per-session frame analysis plus speaker attribution by utterance
// span (frame center inside [start, end); overlaps resolve to the
// earlier-starting utterance). Rejects non-16 kHz audio.
FrameSeries analyze_audio(std::span<const float> samples, int sample_rate,
                          const Session& session);

// Per speaker, per feature: subtract mean, divide by std (sigma = 0 -> 0).
// Voiced-only features normalize over that speaker's voiced frames.
// Unattributed frames are zeroed and take no part in the statistics.
void znorm_per_speaker(FrameSeries& fs);

struct AcousticBlock {
  Role role = Role::Pat;
  std::vector<double> cepstrum;  // 7 stats x MFCC 1..12 = 84
  std::vector<double> prosody;   // 7 stats x {log-pitch, energy, jitter, shimmer} = 28
};

inline constexpr int kCepstrumDim = 84;
inline constexpr int kProsodyDim = 28;

// Reduce a segment's frames to per-role statistic blocks. Pitch, jitter and
// shimmer statistics run over voiced frames only; cepstra and energy over all
// attributed frames. A role with no frames in the segment -> zero block.
std::pair<AcousticBlock, AcousticBlock> acoustic_block(
    const FrameSeries& fs, const Segment& segment,
    const std::map<std::string, Role>& speaker_roles);

}  // namespace empdet
