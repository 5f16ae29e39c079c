#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vsxc {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

/// In-place forward DFT (X[k] = sum x[n] e^{-2 pi i k n / N}) of any length.
/// Powers of two use iterative radix-2; other lengths go through Bluestein.
void fft_inplace(std::vector<Complex>& data);
/// In-place inverse, including the 1/N factor.
void ifft_inplace(std::vector<Complex>& data);

/// Forward transform of a real signal zero-padded to the next power of two.
[[nodiscard]] Spectrum fft_real(std::span<const double> signal);
/// Inverse of fft_real: real parts of the inverse transform, truncated to `length`.
[[nodiscard]] std::vector<double> ifft_real(const Spectrum& spectrum, std::size_t length);

[[nodiscard]] std::size_t next_pow2(std::size_t n);

/// Moves the zero-frequency bin to index n/2 (numpy.fft.fftshift convention).
[[nodiscard]] Spectrum fftshift(const Spectrum& x);
[[nodiscard]] Spectrum ifftshift(const Spectrum& x);

}  // namespace vsxc
