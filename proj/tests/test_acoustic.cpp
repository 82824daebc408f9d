#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <random>
#include <vector>

#include "empdet/acoustic.hpp"
#include "empdet/corpus.hpp"
#include "empdet/dsp.hpp"
#include "empdet/errors.hpp"
#include "empdet/segmentation.hpp"

using namespace empdet;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::vector<float> sine(double f0, double seconds, double amp = 0.5) {
  const auto n = static_cast<std::size_t>(seconds * kSampleRate);
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<float>(amp * std::sin(kTau * f0 * static_cast<double>(i) / kSampleRate));
  }
  return x;
}

std::vector<float> gaussian_noise(std::size_t n, unsigned seed, double amp = 0.1) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d(0.0, amp);
  std::vector<float> x(n);
  for (auto& v : x) v = static_cast<float>(d(gen));
  return x;
}

// Single-sample impulses at `first`, then spaced by cycling `gaps`, with
// cycling `amps`; zero elsewhere.
std::vector<float> pulse_train(std::size_t n, std::size_t first,
                               const std::vector<std::size_t>& gaps,
                               const std::vector<double>& amps, int n_peaks) {
  std::vector<float> x(n, 0.0f);
  std::size_t p = first;
  for (int i = 0; i < n_peaks && p < n; ++i) {
    x[p] = static_cast<float>(amps[i % amps.size()]);
    p += gaps[i % gaps.size()];
  }
  return x;
}

// O(n^2) reference DFT.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -kTau * static_cast<double>(k * j) / static_cast<double>(n);
      acc += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("frame count matches a direct enumeration of frame starts") {
  for (std::size_t n = 0; n <= 5000; ++n) {
    int oracle = 0;
    for (std::size_t s = 0; s + kFrameLen <= n; s += kFrameHop) ++oracle;
    CAPTURE(n);
    REQUIRE(frame_count(n) == oracle);
  }
  CHECK(frame_count(16000) == 98);
  CHECK(frame_count(160000) == 998);
}

TEST_CASE("radix-2 FFT agrees with the O(n^2) DFT") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<std::complex<double>> a(64);
  for (auto& v : a) v = {d(gen), d(gen)};
  auto expect = naive_dft(a);
  auto got = a;
  fft_radix2(got);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(std::abs(got[k] - expect[k]) < 1e-9);
  }
}

TEST_CASE("power spectrum equals |DFT|^2 of the zero-padded frame") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> frame(100);
  for (auto& v : frame) v = d(gen);

  const int nfft = 256;
  auto ps = power_spectrum(frame, nfft);
  REQUIRE(ps.size() == static_cast<std::size_t>(nfft / 2 + 1));

  std::vector<std::complex<double>> padded(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < frame.size(); ++i) padded[i] = {frame[i], 0.0};
  auto spec = naive_dft(padded);
  for (int k = 0; k <= nfft / 2; ++k) {
    CHECK(ps[k] == doctest::Approx(std::norm(spec[k])).epsilon(1e-9));
  }
}

TEST_CASE("DCT-II matrix rows are orthonormal") {
  SUBCASE("square matrix is orthogonal") {
    auto d = dct2_matrix(23, 23);
    for (int i = 0; i < 23; ++i) {
      for (int j = 0; j < 23; ++j) {
        double dot = 0.0;
        for (int k = 0; k < 23; ++k) dot += d[i][k] * d[j][k];
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
    }
  }
  SUBCASE("truncated matrix keeps row orthonormality") {
    auto d = dct2_matrix(kNumMfcc, 23);
    REQUIRE(d.size() == static_cast<std::size_t>(kNumMfcc));
    for (int i = 0; i < kNumMfcc; ++i) {
      REQUIRE(d[i].size() == 23u);
      for (int j = 0; j < kNumMfcc; ++j) {
        double dot = 0.0;
        for (int k = 0; k < 23; ++k) dot += d[i][k] * d[j][k];
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
    }
  }
}

TEST_CASE("mel filterbank is a bank of ordered non-negative triangles") {
  auto fb = mel_filterbank(23, 512, 16000.0, 0.0, 8000.0);
  REQUIRE(fb.size() == 23u);

  std::vector<int> peak_bins;
  for (const auto& row : fb) {
    REQUIRE(row.size() == 257u);
    int peak = 0;
    double best = -1.0;
    for (int b = 0; b < 257; ++b) {
      CHECK(row[b] >= 0.0);
      if (row[b] > best) {
        best = row[b];
        peak = b;
      }
    }
    CHECK(best > 0.0);
    // Triangular: non-decreasing up to the peak, non-increasing after.
    for (int b = 1; b <= peak; ++b) CHECK(row[b] >= row[b - 1] - 1e-12);
    for (int b = peak + 1; b < 257; ++b) CHECK(row[b] <= row[b - 1] + 1e-12);
    peak_bins.push_back(peak);
  }
  for (std::size_t i = 1; i < peak_bins.size(); ++i) CHECK(peak_bins[i] > peak_bins[i - 1]);
  // Interior coverage: between the first and last peak, some filter is active.
  for (int b = peak_bins.front(); b <= peak_bins.back(); ++b) {
    double total = 0.0;
    for (const auto& row : fb) total += row[b];
    CHECK(total > 0.0);
  }
}

TEST_CASE("mel scale conversions invert each other") {
  for (double hz : {0.0, 100.0, 700.0, 1000.0, 4000.0, 8000.0}) {
    CHECK(mel_to_hz(hz_to_mel(hz)) == doctest::Approx(hz).epsilon(1e-9));
  }
  CHECK(hz_to_mel(0.0) == doctest::Approx(0.0));
  // Monotone increasing.
  CHECK(hz_to_mel(200.0) > hz_to_mel(100.0));
  CHECK(hz_to_mel(8000.0) > hz_to_mel(4000.0));
}

TEST_CASE("framing applies pre-emphasis then a Hamming window") {
  std::vector<float> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(i) / 1000.0f;
  auto frames = frame_signal(x);
  REQUIRE(static_cast<int>(frames.size()) == frame_count(x.size()));
  REQUIRE(frames[0].size() == static_cast<std::size_t>(kFrameLen));

  // window[0] = 0.54 - 0.46 = 0.08; emphasized[0] = x[0].
  CHECK(frames[0][0] == doctest::Approx(static_cast<double>(x[0]) * 0.08).epsilon(1e-12));
  const double w1 = 0.54 - 0.46 * std::cos(kTau * 1.0 / (kFrameLen - 1));
  const double e1 = static_cast<double>(x[1]) - 0.97 * static_cast<double>(x[0]);
  CHECK(frames[0][1] == doctest::Approx(e1 * w1).epsilon(1e-12));
  // Second frame starts at sample 160.
  const double e160 = static_cast<double>(x[160]) - 0.97 * static_cast<double>(x[159]);
  CHECK(frames[1][0] == doctest::Approx(e160 * 0.08).epsilon(1e-12));
}

TEST_CASE("short signals produce no frames") {
  std::vector<float> x(kFrameLen - 1, 0.5f);
  CHECK(frame_signal(x).empty());
  CHECK(frame_count(x.size()) == 0);
}

TEST_CASE("seven summary statistics match hand-worked values") {
  SUBCASE("1 2 3 4") {
    std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    auto s = stats7(xs);
    CHECK(s[0] == doctest::Approx(4.0));
    CHECK(s[1] == doctest::Approx(1.0));
    CHECK(s[2] == doctest::Approx(2.5));
    CHECK(s[3] == doctest::Approx(2.5));
    CHECK(s[4] == doctest::Approx(1.1180339887498949).epsilon(1e-12));
    CHECK(s[5] == doctest::Approx(0.0).epsilon(1e-12));
    // m4/m2^2 - 3 = 2.5625/1.5625 - 3.
    CHECK(s[6] == doctest::Approx(-1.36).epsilon(1e-12));
  }
  SUBCASE("odd length takes the middle order statistic") {
    std::vector<double> xs{5.0, 1.0, 3.0};
    CHECK(stats7(xs)[3] == doctest::Approx(3.0));
  }
  SUBCASE("constant series zeroes the shape statistics") {
    std::vector<double> xs{2.0, 2.0, 2.0};
    auto s = stats7(xs);
    CHECK(s[0] == doctest::Approx(2.0));
    CHECK(s[2] == doctest::Approx(2.0));
    CHECK(s[4] == 0.0);
    CHECK(s[5] == 0.0);
    CHECK(s[6] == 0.0);
  }
  SUBCASE("empty input is all zeros") {
    auto s = stats7(std::vector<double>{});
    for (double v : s) CHECK(v == 0.0);
  }
  SUBCASE("order invariance") {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    std::vector<double> xs(101);
    for (auto& v : xs) v = d(gen);
    auto fwd = stats7(xs);
    std::reverse(xs.begin(), xs.end());
    auto rev = stats7(xs);
    for (int i = 0; i < 7; ++i) CHECK(fwd[i] == doctest::Approx(rev[i]).epsilon(1e-12));
  }
}

TEST_CASE("pitch tracker recovers pure tones within 5 percent") {
  for (double f0 : {80.0, 120.0, 180.0, 250.0, 350.0}) {
    CAPTURE(f0);
    auto x = sine(f0, 0.5);
    auto track = track_pitch(x);
    REQUIRE(static_cast<int>(track.voiced.size()) == frame_count(x.size()));

    int n_voiced = 0;
    for (std::size_t f = 0; f < track.voiced.size(); ++f) {
      if (!track.voiced[f]) continue;
      ++n_voiced;
      CHECK(std::abs(track.f0_hz[f] - f0) <= 0.05 * f0);
    }
    // Trailing frames lack correlation context and stay unvoiced; the bulk
    // of a sustained tone must not.
    CHECK(n_voiced >= static_cast<int>(track.voiced.size()) / 2);
  }
}

TEST_CASE("silence is never voiced") {
  std::vector<float> x(8000, 0.0f);
  auto track = track_pitch(x);
  for (auto v : track.voiced) CHECK(v == 0);
}

TEST_CASE("jitter matches the hand-walked alternating-period train") {
  // Impulses at 50, then gaps alternating 100/110 samples; the walker tracks
  // period 105 and finds all 8 peaks, so the 7 periods are
  // 100,110,100,110,100,110,100 and mean |dT| / mean T = 10 / (730/7) = 7/73.
  auto x = pulse_train(900, 50, {100, 110}, {1.0}, 8);
  PitchTrack track;
  track.voiced = {1};
  track.f0_hz = {static_cast<double>(kSampleRate) / 105.0};
  auto js = jitter_shimmer(x, track);
  REQUIRE(js.jitter.size() == 1u);
  CHECK(js.jitter[0] == doctest::Approx(7.0 / 73.0).epsilon(1e-12));
  // Equal amplitudes: no shimmer.
  CHECK(js.shimmer[0] == 0.0);
}

TEST_CASE("shimmer matches the hand-walked alternating-amplitude train") {
  // Impulses every 105 samples, amplitudes alternating 1.0/0.8: amplitude
  // steps average 0.2 against a mean of 0.9.
  auto x = pulse_train(900, 50, {105}, {1.0, 0.8}, 8);
  PitchTrack track;
  track.voiced = {1};
  track.f0_hz = {static_cast<double>(kSampleRate) / 105.0};
  auto js = jitter_shimmer(x, track);
  // The stored samples are floats, so the oracle quantizes the same way.
  const double lo_amp = static_cast<double>(static_cast<float>(0.8));
  const double expect = (1.0 - lo_amp) / ((4.0 + 4.0 * lo_amp) / 8.0);
  CHECK(js.shimmer[0] == doctest::Approx(expect).epsilon(1e-12));
  // Equal spacing: no jitter.
  CHECK(js.jitter[0] == 0.0);
}

TEST_CASE("fewer than four walked peaks leaves jitter and shimmer zero") {
  auto x = pulse_train(260, 50, {100}, {1.0}, 3);
  PitchTrack track;
  track.voiced = {1};
  track.f0_hz = {static_cast<double>(kSampleRate) / 100.0};
  auto js = jitter_shimmer(x, track);
  CHECK(js.jitter[0] == 0.0);
  CHECK(js.shimmer[0] == 0.0);
}

TEST_CASE("unvoiced frames carry zero jitter and shimmer") {
  auto x = pulse_train(900, 50, {100, 110}, {1.0}, 8);
  PitchTrack track;
  track.voiced = {0};
  track.f0_hz = {0.0};
  auto js = jitter_shimmer(x, track);
  CHECK(js.jitter[0] == 0.0);
  CHECK(js.shimmer[0] == 0.0);
}

TEST_CASE("a perfectly periodic tone has vanishing jitter and shimmer") {
  // 160 Hz at 16 kHz: the period is exactly 100 samples, so walked peak
  // positions and amplitudes repeat exactly.
  auto x = sine(160.0, 0.6);
  auto track = track_pitch(x);
  auto js = jitter_shimmer(x, track);
  int checked = 0;
  for (std::size_t f = 0; f < track.voiced.size(); ++f) {
    if (!track.voiced[f]) continue;
    // Only frames whose full 8-peak walk fits in the signal; a clipped final
    // window near the end picks a slope sample instead of a peak.
    if (f * kFrameHop + 1000 > x.size()) continue;
    CHECK(js.jitter[f] < 1e-9);
    CHECK(js.shimmer[f] < 1e-9);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("audio analysis rejects a wrong sample rate") {
  Session session;
  session.session_id = "s1";
  std::vector<float> x(8000, 0.0f);
  CHECK_THROWS_AS(analyze_audio(x, 8000, session), InputError);
  CHECK_THROWS_AS(analyze_audio(x, 44100, session), InputError);
}

TEST_CASE("frames attribute to the earlier-starting covering utterance") {
  Session session;
  session.session_id = "s1";
  session.utterances.push_back({"s1", "p1", 0.5, 1.2, {"a"}});
  session.utterances.push_back({"s1", "d1", 1.0, 2.0, {"b"}});

  std::vector<float> x(40000, 0.0f);  // 2.5 s
  auto fs = analyze_audio(x, kSampleRate, session);
  REQUIRE(fs.n_frames == frame_count(x.size()));
  REQUIRE(fs.speaker_ids == std::vector<std::string>{"d1", "p1"});

  for (int f = 0; f < fs.n_frames; ++f) {
    const double t = fs.frame_center_s(f);
    std::int32_t expect = -1;
    if (t >= 0.5 && t < 1.2) expect = 1;        // p1 covers [0.5, 1.2); wins the overlap
    else if (t >= 1.2 && t < 2.0) expect = 0;   // d1 alone covers the rest
    CAPTURE(f);
    REQUIRE(fs.speaker[f] == expect);
  }
}

TEST_CASE("per-speaker normalization zeroes means and scales variance to one") {
  // Two speakers with distinct tones so both get voiced frames; noise keeps
  // every cepstral dimension non-degenerate.
  Session session;
  session.session_id = "s1";
  session.utterances.push_back({"s1", "p1", 0.0, 1.5, {"a"}});
  session.utterances.push_back({"s1", "d1", 1.5, 2.7, {"b"}});  // tail past 2.7 s unattributed

  auto tone_a = sine(150.0, 1.5, 0.4);
  auto tone_b = sine(220.0, 1.5, 0.4);
  auto noise = gaussian_noise(48000, 17, 0.05);
  std::vector<float> x(48000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = (i < 24000 ? tone_a[i] : tone_b[i - 24000]) + noise[i];
  }

  auto fs = analyze_audio(x, kSampleRate, session);
  znorm_per_speaker(fs);

  for (int sp = 0; sp < 2; ++sp) {
    for (int k = 0; k < kNumMfcc; ++k) {
      double sum = 0.0, sumsq = 0.0;
      int n = 0;
      for (int f = 0; f < fs.n_frames; ++f) {
        if (fs.speaker[f] != sp) continue;
        sum += fs.mfcc[f][k];
        sumsq += fs.mfcc[f][k] * fs.mfcc[f][k];
        ++n;
      }
      REQUIRE(n > 10);
      const double mean = sum / n;
      const double var = sumsq / n - mean * mean;
      CAPTURE(sp);
      CAPTURE(k);
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(std::sqrt(std::max(var, 0.0)) - 1.0) < 1e-6);
    }
    // Voiced-only features normalize over the speaker's voiced frames.
    double sum = 0.0;
    int n = 0;
    for (int f = 0; f < fs.n_frames; ++f) {
      if (fs.speaker[f] != sp || !fs.voiced[f]) continue;
      sum += fs.log_pitch[f];
      ++n;
    }
    REQUIRE(n > 10);
    CHECK(std::abs(sum / n) < 1e-9);
  }

  // Frames outside every utterance are zeroed.
  bool saw_unattributed = false;
  for (int f = 0; f < fs.n_frames; ++f) {
    if (fs.speaker[f] >= 0) continue;
    saw_unattributed = true;
    for (int k = 0; k < kNumMfcc; ++k) CHECK(fs.mfcc[f][k] == 0.0);
    CHECK(fs.log_pitch[f] == 0.0);
    CHECK(fs.jitter[f] == 0.0);
    CHECK(fs.shimmer[f] == 0.0);
  }
  CHECK(saw_unattributed);  // the tail past 3.0 s has no utterance
}

TEST_CASE("normalized features are invariant to amplitude scaling") {
  Session session;
  session.session_id = "s1";
  session.utterances.push_back({"s1", "p1", 0.0, 1.5, {"a"}});

  auto tone = sine(180.0, 1.5, 0.4);
  auto noise = gaussian_noise(tone.size(), 23, 0.05);
  std::vector<float> x(tone.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = tone[i] + noise[i];
  std::vector<float> scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = 2.5f * x[i];

  auto a = analyze_audio(x, kSampleRate, session);
  auto b = analyze_audio(scaled, kSampleRate, session);

  // Voicing decisions and pitch come from normalized correlation.
  REQUIRE(a.voiced == b.voiced);
  for (int f = 0; f < a.n_frames; ++f) {
    if (a.voiced[f]) CHECK(a.log_pitch[f] == doctest::Approx(b.log_pitch[f]).epsilon(1e-3));
  }

  znorm_per_speaker(a);
  znorm_per_speaker(b);
  for (int f = 0; f < a.n_frames; ++f) {
    for (int k = 0; k < kNumMfcc; ++k) {
      CHECK(a.mfcc[f][k] == doctest::Approx(b.mfcc[f][k]).epsilon(1e-4));
    }
  }
}

TEST_CASE("segment reduction routes frames by role and voicing") {
  FrameSeries fs;
  fs.n_frames = 10;
  fs.speaker_ids = {"a", "b", "c"};
  fs.speaker = {0, 0, 1, 1, 2, 0, 1, -1, 0, 1};
  fs.voiced = {1, 0, 1, 1, 0, 1, 0, 0, 1, 1};
  fs.mfcc.resize(10);
  fs.log_pitch.resize(10);
  fs.jitter.resize(10);
  fs.shimmer.resize(10);
  for (int f = 0; f < 10; ++f) {
    for (int k = 0; k < kNumMfcc; ++k) fs.mfcc[f][k] = f + 0.1 * k;
    fs.log_pitch[f] = 10.0 + f;
    fs.jitter[f] = 0.01 * f;
    fs.shimmer[f] = 0.001 * f;
  }

  std::map<std::string, Role> roles{{"a", Role::Pat}, {"b", Role::Hcp}, {"c", Role::Ff}};

  // Frame centers are 0.0125 + 0.01 f; end 0.0925 admits frames 0..7 only
  // (a center exactly at the end falls outside).
  Segment seg;
  seg.session_id = "s1";
  seg.start_s = 0.0;
  seg.end_s = 0.0925;
  auto [pat, hcp] = acoustic_block(fs, seg, roles);

  REQUIRE(pat.cepstrum.size() == static_cast<std::size_t>(kCepstrumDim));
  REQUIRE(pat.prosody.size() == static_cast<std::size_t>(kProsodyDim));
  CHECK(pat.role == Role::Pat);
  CHECK(hcp.role == Role::Hcp);

  // In-segment frames: speaker a -> {0,1,5}, b -> {2,3,6}; the family member
  // (frame 4) and the unattributed frame (7) contribute nowhere.
  auto collect = [&](std::vector<int> frames, auto value, bool voiced_only) {
    std::vector<double> xs;
    for (int f : frames) {
      if (voiced_only && !fs.voiced[f]) continue;
      xs.push_back(value(f));
    }
    return xs;
  };
  auto expect_block = [&](const std::vector<int>& frames) {
    std::vector<double> cep, pro;
    for (int k = 1; k < kNumMfcc; ++k) {
      auto s = stats7(collect(frames, [&](int f) { return fs.mfcc[f][k]; }, false));
      cep.insert(cep.end(), s.begin(), s.end());
    }
    auto lp = stats7(collect(frames, [&](int f) { return fs.log_pitch[f]; }, true));
    auto en = stats7(collect(frames, [&](int f) { return fs.mfcc[f][0]; }, false));
    auto ji = stats7(collect(frames, [&](int f) { return fs.jitter[f]; }, true));
    auto sh = stats7(collect(frames, [&](int f) { return fs.shimmer[f]; }, true));
    for (const auto& s : {lp, en, ji, sh}) pro.insert(pro.end(), s.begin(), s.end());
    return std::pair{cep, pro};
  };

  auto [pat_cep, pat_pro] = expect_block({0, 1, 5});
  auto [hcp_cep, hcp_pro] = expect_block({2, 3, 6});
  CHECK(pat.cepstrum == pat_cep);
  CHECK(pat.prosody == pat_pro);
  CHECK(hcp.cepstrum == hcp_cep);
  CHECK(hcp.prosody == hcp_pro);
}

TEST_CASE("a role absent from the segment yields an all-zero block") {
  FrameSeries fs;
  fs.n_frames = 4;
  fs.speaker_ids = {"a"};
  fs.speaker = {0, 0, 0, 0};
  fs.voiced = {1, 1, 0, 1};
  fs.mfcc.resize(4);
  fs.log_pitch.assign(4, 5.0);
  fs.jitter.assign(4, 0.02);
  fs.shimmer.assign(4, 0.03);
  for (int f = 0; f < 4; ++f) fs.mfcc[f].fill(1.0 + f);

  std::map<std::string, Role> roles{{"a", Role::Pat}};
  Segment seg;
  seg.start_s = 0.0;
  seg.end_s = 1.0;
  auto [pat, hcp] = acoustic_block(fs, seg, roles);

  CHECK(pat.cepstrum[0] == doctest::Approx(4.0));  // max of mfcc[.][1]
  for (double v : hcp.cepstrum) CHECK(v == 0.0);
  for (double v : hcp.prosody) CHECK(v == 0.0);
}

TEST_CASE("family-member speech never enters either role block") {
  FrameSeries fs;
  fs.n_frames = 3;
  fs.speaker_ids = {"a", "f"};
  fs.speaker = {0, 1, 1};
  fs.voiced = {1, 1, 1};
  fs.mfcc.resize(3);
  fs.log_pitch.assign(3, 4.0);
  fs.jitter.assign(3, 0.0);
  fs.shimmer.assign(3, 0.0);
  for (int f = 0; f < 3; ++f) fs.mfcc[f].fill(100.0 * (f + 1));

  std::map<std::string, Role> roles{{"a", Role::Pat}, {"f", Role::Ff}};
  Segment seg;
  seg.start_s = 0.0;
  seg.end_s = 1.0;
  auto [pat, hcp] = acoustic_block(fs, seg, roles);

  // Only frame 0 (speaker a) contributes; frames 1-2 belong to the family
  // member and must vanish from both blocks.
  CHECK(pat.cepstrum[0] == doctest::Approx(100.0));
  for (double v : hcp.cepstrum) CHECK(v == 0.0);
}
