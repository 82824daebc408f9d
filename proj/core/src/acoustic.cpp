#include "empdet/acoustic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "empdet/dsp.hpp"
#include "empdet/errors.hpp"

namespace empdet {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr int kNfft = 512;
constexpr int kNumMelFilters = 23;
constexpr double kLogFloor = 1e-10;
constexpr double kPreEmphasis = 0.97;

// Pitch search runs at 8 kHz on the 2x-decimated signal.
constexpr int kPitchRate = 8000;
constexpr int kPitchHop = 80;       // 10 ms
constexpr int kPitchWindow = 134;   // correlation window, ~17 ms
constexpr int kLagMin = 20;         // 400 Hz
constexpr int kLagMax = 133;        // ~60 Hz
constexpr double kVoicingThreshold = 0.45;
constexpr double kOctavePenalty = 0.02;
}  // namespace

int frame_count(std::size_t n_samples) {
  if (n_samples < static_cast<std::size_t>(kFrameLen)) return 0;
  return static_cast<int>((n_samples - kFrameLen) / kFrameHop) + 1;
}

std::vector<std::vector<double>> frame_signal(std::span<const float> samples) {
  const int n_frames = frame_count(samples.size());
  std::vector<double> emphasized(samples.size());
  if (!samples.empty()) {
    emphasized[0] = samples[0];
    for (std::size_t i = 1; i < samples.size(); ++i) {
      emphasized[i] = samples[i] - kPreEmphasis * samples[i - 1];
    }
  }
  std::vector<double> window(kFrameLen);
  for (int i = 0; i < kFrameLen; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (kFrameLen - 1));
  }
  std::vector<std::vector<double>> frames(n_frames, std::vector<double>(kFrameLen));
  for (int f = 0; f < n_frames; ++f) {
    const std::size_t off = static_cast<std::size_t>(f) * kFrameHop;
    for (int i = 0; i < kFrameLen; ++i) {
      frames[f][i] = emphasized[off + i] * window[i];
    }
  }
  return frames;
}

std::vector<std::array<double, kNumMfcc>> compute_mfcc(
    const std::vector<std::vector<double>>& frames) {
  static const auto fb = mel_filterbank(kNumMelFilters, kNfft, kSampleRate, 0.0, 8000.0);
  static const auto dct = dct2_matrix(kNumMfcc, kNumMelFilters);

  std::vector<std::array<double, kNumMfcc>> out(frames.size());
  std::vector<double> logmel(kNumMelFilters);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    auto power = power_spectrum(frames[f], kNfft);
    for (int m = 0; m < kNumMelFilters; ++m) {
      double e = 0.0;
      const auto& filt = fb[m];
      for (std::size_t b = 0; b < power.size(); ++b) e += filt[b] * power[b];
      logmel[m] = std::log(std::max(e, kLogFloor));
    }
    for (int k = 0; k < kNumMfcc; ++k) {
      double c = 0.0;
      for (int m = 0; m < kNumMelFilters; ++m) c += dct[k][m] * logmel[m];
      out[f][k] = c;
    }
  }
  return out;
}

PitchTrack track_pitch(std::span<const float> samples) {
  const int n_frames = frame_count(samples.size());
  PitchTrack track;
  track.f0_hz.assign(n_frames, 0.0);
  track.voiced.assign(n_frames, 0);

  // Crude anti-alias + decimation to 8 kHz: average sample pairs.
  std::vector<double> x(samples.size() / 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 0.5 * (samples[2 * i] + samples[2 * i + 1]);
  }

  std::vector<double> nccf(kLagMax + 1, 0.0);
  for (int f = 0; f < n_frames; ++f) {
    const std::size_t s = static_cast<std::size_t>(f) * kPitchHop;
    if (s + kLagMax + kPitchWindow > x.size()) break;  // trailing frames stay unvoiced

    double e0 = 0.0;
    for (int j = 0; j < kPitchWindow; ++j) e0 += x[s + j] * x[s + j];
    if (e0 < 1e-9) continue;  // silence

    // Lagged-window energy slides with tau.
    double et = 0.0;
    for (int j = 0; j < kPitchWindow; ++j) et += x[s + kLagMin + j] * x[s + kLagMin + j];

    int best_lag = -1;
    double best_score = -1e9;
    for (int tau = kLagMin; tau <= kLagMax; ++tau) {
      double cross = 0.0;
      for (int j = 0; j < kPitchWindow; ++j) cross += x[s + j] * x[s + tau + j];
      double c = cross / std::sqrt(e0 * et + 1e-20);
      nccf[tau] = c;
      // Mild preference for shorter lags to suppress octave-down errors.
      double score = c - kOctavePenalty * std::log2(static_cast<double>(tau) / kLagMin);
      if (score > best_score) {
        best_score = score;
        best_lag = tau;
      }
      if (tau < kLagMax) {
        et += x[s + tau + kPitchWindow] * x[s + tau + kPitchWindow] - x[s + tau] * x[s + tau];
      }
    }

    if (best_lag < 0 || nccf[best_lag] < kVoicingThreshold) continue;

    double lag = best_lag;
    if (best_lag > kLagMin && best_lag < kLagMax) {
      double c0 = nccf[best_lag - 1], c1 = nccf[best_lag], c2 = nccf[best_lag + 1];
      double denom = c0 - 2.0 * c1 + c2;
      if (std::abs(denom) > 1e-12) {
        double delta = 0.5 * (c0 - c2) / denom;
        lag += std::clamp(delta, -0.5, 0.5);
      }
    }
    track.voiced[f] = 1;
    track.f0_hz[f] = static_cast<double>(kPitchRate) / lag;
  }
  return track;
}

namespace {

// Peak positions at the tracked period, walking right from `start`;
// capped at 8 peaks so the relative-difference stats stay local.
std::vector<std::size_t> walk_peaks(std::span<const float> x, std::size_t start, double t0) {
  constexpr int kMaxPeaks = 8;
  std::vector<std::size_t> peaks;
  std::size_t w_end = std::min(x.size(), start + static_cast<std::size_t>(1.5 * t0));
  if (start >= w_end) return peaks;
  std::size_t p = start;
  for (std::size_t i = start; i < w_end; ++i) {
    if (x[i] > x[p]) p = i;
  }
  peaks.push_back(p);
  while (static_cast<int>(peaks.size()) < kMaxPeaks) {
    std::size_t lo = peaks.back() + static_cast<std::size_t>(0.7 * t0);
    std::size_t hi = peaks.back() + static_cast<std::size_t>(1.3 * t0);
    hi = std::min(hi, x.size());
    if (lo >= hi) break;
    std::size_t q = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      if (x[i] > x[q]) q = i;
    }
    peaks.push_back(q);
  }
  return peaks;
}

}  // namespace

JitterShimmerTrack jitter_shimmer(std::span<const float> samples, const PitchTrack& pitch) {
  const std::size_t n_frames = pitch.voiced.size();
  JitterShimmerTrack track;
  track.jitter.assign(n_frames, 0.0);
  track.shimmer.assign(n_frames, 0.0);

  for (std::size_t f = 0; f < n_frames; ++f) {
    if (!pitch.voiced[f] || pitch.f0_hz[f] <= 0.0) continue;
    const double t0 = static_cast<double>(kSampleRate) / pitch.f0_hz[f];
    auto peaks = walk_peaks(samples, f * kFrameHop, t0);
    if (peaks.size() < 4) continue;  // under 3 full periods: leave features 0

    std::vector<double> periods(peaks.size() - 1);
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
      periods[i] = static_cast<double>(peaks[i + 1] - peaks[i]);
    }
    double mean_t = std::accumulate(periods.begin(), periods.end(), 0.0) / periods.size();
    double dt = 0.0;
    for (std::size_t i = 1; i < periods.size(); ++i) dt += std::abs(periods[i] - periods[i - 1]);
    dt /= static_cast<double>(periods.size() - 1);
    if (mean_t > 0.0) track.jitter[f] = dt / mean_t;

    std::vector<double> amps(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i) amps[i] = samples[peaks[i]];
    double mean_a = std::accumulate(amps.begin(), amps.end(), 0.0) / amps.size();
    double da = 0.0;
    for (std::size_t i = 1; i < amps.size(); ++i) da += std::abs(amps[i] - amps[i - 1]);
    da /= static_cast<double>(amps.size() - 1);
    if (mean_a > 1e-12) track.shimmer[f] = da / mean_a;
  }
  return track;
}

std::array<double, 7> stats7(std::span<const double> xs) {
  std::array<double, 7> out{};
  const std::size_t n = xs.size();
  if (n == 0) return out;

  double mx = xs[0], mn = xs[0], sum = 0.0;
  for (double x : xs) {
    mx = std::max(mx, x);
    mn = std::min(mn, x);
    sum += x;
  }
  const double mean = sum / static_cast<double>(n);

  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);

  out[0] = mx;
  out[1] = mn;
  out[2] = mean;
  out[3] = median;
  if (m2 > 0.0) {
    out[4] = std::sqrt(m2);
    out[5] = m3 / std::pow(m2, 1.5);
    out[6] = m4 / (m2 * m2) - 3.0;  // excess kurtosis; 0 for a degenerate series
  }
  return out;
}

FrameSeries analyze_audio(std::span<const float> samples, int sample_rate,
                          const Session& session) {
  if (sample_rate != kSampleRate) {
    throw InputError("audio for session " + session.session_id + " is " +
                     std::to_string(sample_rate) + " Hz; the pipeline requires 16 kHz");
  }
  FrameSeries fs;
  fs.n_frames = frame_count(samples.size());
  fs.mfcc = compute_mfcc(frame_signal(samples));
  auto pitch = track_pitch(samples);
  auto js = jitter_shimmer(samples, pitch);
  fs.voiced = std::move(pitch.voiced);
  fs.jitter = std::move(js.jitter);
  fs.shimmer = std::move(js.shimmer);
  fs.log_pitch.assign(fs.n_frames, 0.0);
  for (int f = 0; f < fs.n_frames; ++f) {
    if (fs.voiced[f]) fs.log_pitch[f] = std::log(pitch.f0_hz[f]);
  }

  std::set<std::string> speakers;
  for (const auto& u : session.utterances) speakers.insert(u.speaker_id);
  fs.speaker_ids.assign(speakers.begin(), speakers.end());
  std::map<std::string, std::int32_t> speaker_idx;
  for (std::size_t i = 0; i < fs.speaker_ids.size(); ++i) {
    speaker_idx[fs.speaker_ids[i]] = static_cast<std::int32_t>(i);
  }

  // Frame centers walk forward in time; keep a window of utterances whose
  // span could contain them. Ties (overlapping spans) go to the
  // earlier-starting utterance, which is first in sorted order.
  fs.speaker.assign(fs.n_frames, -1);
  std::vector<std::size_t> active;
  std::size_t next_utt = 0;
  for (int f = 0; f < fs.n_frames; ++f) {
    const double t = fs.frame_center_s(f);
    while (next_utt < session.utterances.size() &&
           session.utterances[next_utt].start_s <= t) {
      active.push_back(next_utt++);
    }
    std::erase_if(active, [&](std::size_t i) { return session.utterances[i].end_s <= t; });
    for (std::size_t i : active) {
      if (t < session.utterances[i].end_s) {
        fs.speaker[f] = speaker_idx[session.utterances[i].speaker_id];
        break;
      }
    }
  }
  return fs;
}

void znorm_per_speaker(FrameSeries& fs) {
  const int n_speakers = static_cast<int>(fs.speaker_ids.size());
  // 13 cepstra over all frames, then log-pitch / jitter / shimmer over
  // voiced frames only.
  constexpr int kNumFeatures = kNumMfcc + 3;

  for (int sp = 0; sp < n_speakers; ++sp) {
    double sum[kNumFeatures] = {0};
    double sumsq[kNumFeatures] = {0};
    std::int64_t count[kNumFeatures] = {0};
    for (int f = 0; f < fs.n_frames; ++f) {
      if (fs.speaker[f] != sp) continue;
      for (int k = 0; k < kNumMfcc; ++k) {
        sum[k] += fs.mfcc[f][k];
        sumsq[k] += fs.mfcc[f][k] * fs.mfcc[f][k];
        ++count[k];
      }
      if (fs.voiced[f]) {
        const double v[3] = {fs.log_pitch[f], fs.jitter[f], fs.shimmer[f]};
        for (int k = 0; k < 3; ++k) {
          sum[kNumMfcc + k] += v[k];
          sumsq[kNumMfcc + k] += v[k] * v[k];
          ++count[kNumMfcc + k];
        }
      }
    }
    double mean[kNumFeatures], sigma[kNumFeatures];
    for (int k = 0; k < kNumFeatures; ++k) {
      if (count[k] == 0) {
        mean[k] = 0.0;
        sigma[k] = 0.0;
        continue;
      }
      mean[k] = sum[k] / static_cast<double>(count[k]);
      double var = sumsq[k] / static_cast<double>(count[k]) - mean[k] * mean[k];
      sigma[k] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    auto norm = [](double x, double mu, double sd) { return sd > 0.0 ? (x - mu) / sd : 0.0; };
    for (int f = 0; f < fs.n_frames; ++f) {
      if (fs.speaker[f] != sp) continue;
      for (int k = 0; k < kNumMfcc; ++k) {
        fs.mfcc[f][k] = norm(fs.mfcc[f][k], mean[k], sigma[k]);
      }
      if (fs.voiced[f]) {
        fs.log_pitch[f] = norm(fs.log_pitch[f], mean[kNumMfcc], sigma[kNumMfcc]);
        fs.jitter[f] = norm(fs.jitter[f], mean[kNumMfcc + 1], sigma[kNumMfcc + 1]);
        fs.shimmer[f] = norm(fs.shimmer[f], mean[kNumMfcc + 2], sigma[kNumMfcc + 2]);
      }
    }
  }

  // Frames outside every utterance take no part upstream or downstream.
  for (int f = 0; f < fs.n_frames; ++f) {
    if (fs.speaker[f] >= 0) continue;
    fs.mfcc[f].fill(0.0);
    fs.log_pitch[f] = fs.jitter[f] = fs.shimmer[f] = 0.0;
  }
}

std::pair<AcousticBlock, AcousticBlock> acoustic_block(
    const FrameSeries& fs, const Segment& segment,
    const std::map<std::string, Role>& speaker_roles) {
  // Map frame speaker index -> role once.
  std::vector<int> role_of(fs.speaker_ids.size(), -1);
  for (std::size_t i = 0; i < fs.speaker_ids.size(); ++i) {
    auto it = speaker_roles.find(fs.speaker_ids[i]);
    if (it != speaker_roles.end() && it->second != Role::Ff) {
      role_of[i] = it->second == Role::Pat ? 0 : 1;
    }
  }

  struct Series {
    std::vector<double> mfcc[kNumMfcc];
    std::vector<double> log_pitch, jitter, shimmer;
  };
  Series series[2];
  for (int f = 0; f < fs.n_frames; ++f) {
    const double t = fs.frame_center_s(f);
    if (t < segment.start_s || t >= segment.end_s) continue;
    if (fs.speaker[f] < 0) continue;
    int r = role_of[fs.speaker[f]];
    if (r < 0) continue;
    for (int k = 0; k < kNumMfcc; ++k) series[r].mfcc[k].push_back(fs.mfcc[f][k]);
    if (fs.voiced[f]) {
      series[r].log_pitch.push_back(fs.log_pitch[f]);
      series[r].jitter.push_back(fs.jitter[f]);
      series[r].shimmer.push_back(fs.shimmer[f]);
    }
  }

  auto build = [&](int r, Role role) {
    AcousticBlock block;
    block.role = role;
    block.cepstrum.reserve(kCepstrumDim);
    for (int k = 1; k < kNumMfcc; ++k) {
      auto s = stats7(series[r].mfcc[k]);
      block.cepstrum.insert(block.cepstrum.end(), s.begin(), s.end());
    }
    block.prosody.reserve(kProsodyDim);
    for (const auto* xs :
         {&series[r].log_pitch, &series[r].mfcc[0], &series[r].jitter, &series[r].shimmer}) {
      auto s = stats7(*xs);
      block.prosody.insert(block.prosody.end(), s.begin(), s.end());
    }
    return block;
  };
  return {build(0, Role::Pat), build(1, Role::Hcp)};
}

}  // namespace empdet
