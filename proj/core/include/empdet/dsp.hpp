#pragma once

#include <complex>
#include <span>
#include <vector>

namespace empdet {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a);

// |FFT|^2 of the (real) frame zero-padded to nfft; returns nfft/2 + 1 bins.
std::vector<double> power_spectrum(std::span<const double> frame, int nfft);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters over FFT bins, rows = filters. Standard HTK-style
// mel-spaced center frequencies between fmin and fmax.
std::vector<std::vector<double>> mel_filterbank(int n_filters, int nfft, double sample_rate,
                                                double fmin, double fmax);

// Orthonormal DCT-II matrix (n_out x n_in): D[0] row scaled by sqrt(1/n),
// the rest by sqrt(2/n), so D * D^T = I when n_out == n_in.
std::vector<std::vector<double>> dct2_matrix(int n_out, int n_in);

}  // namespace empdet
