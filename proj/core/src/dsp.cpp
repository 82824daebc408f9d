#include "empdet/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "empdet/errors.hpp"

namespace empdet {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw InputError("FFT size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / static_cast<double>(len);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<double> power_spectrum(std::span<const double> frame, int nfft) {
  std::vector<std::complex<double>> a(static_cast<std::size_t>(nfft));
  const std::size_t n = std::min(frame.size(), static_cast<std::size_t>(nfft));
  for (std::size_t i = 0; i < n; ++i) a[i] = frame[i];
  fft_radix2(a);
  std::vector<double> power(static_cast<std::size_t>(nfft / 2 + 1));
  for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::norm(a[i]);
  return power;
}

double hz_to_mel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

std::vector<std::vector<double>> mel_filterbank(int n_filters, int nfft, double sample_rate,
                                                double fmin, double fmax) {
  const int n_bins = nfft / 2 + 1;
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  // n_filters + 2 edge frequencies, mel-equidistant, mapped onto FFT bins.
  std::vector<double> edges(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i) {
    double mel = mel_lo + (mel_hi - mel_lo) * i / static_cast<double>(n_filters + 1);
    edges[i] = mel_to_hz(mel) * nfft / sample_rate;  // fractional bin
  }

  std::vector<std::vector<double>> fb(n_filters, std::vector<double>(n_bins, 0.0));
  for (int f = 0; f < n_filters; ++f) {
    double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
    for (int b = 0; b < n_bins; ++b) {
      double x = static_cast<double>(b);
      if (x > lo && x < mid) {
        fb[f][b] = (x - lo) / (mid - lo);
      } else if (x >= mid && x < hi) {
        fb[f][b] = (hi - x) / (hi - mid);
      }
    }
  }
  return fb;
}

std::vector<std::vector<double>> dct2_matrix(int n_out, int n_in) {
  std::vector<std::vector<double>> d(n_out, std::vector<double>(n_in));
  const double scale0 = std::sqrt(1.0 / n_in);
  const double scale = std::sqrt(2.0 / n_in);
  for (int k = 0; k < n_out; ++k) {
    for (int n = 0; n < n_in; ++n) {
      d[k][n] = (k == 0 ? scale0 : scale) *
                std::cos(kPi * (n + 0.5) * k / static_cast<double>(n_in));
    }
  }
  return d;
}

}  // namespace empdet
