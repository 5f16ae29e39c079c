#include "vsxc/fft.hpp"

#include <cmath>
#include <numbers>

#include "vsxc/error.hpp"

namespace vsxc {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void radix2(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        // Twiddles computed directly (not by repeated multiplication) to keep
        // round-off at the 1e-15 level for large n.
        std::vector<Complex> w(half);
        for (std::size_t k = 0; k < half; ++k) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            w[k] = {std::cos(ang), std::sin(ang)};
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + half] * w[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

void bluestein(std::vector<Complex>& x, bool inverse) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<Complex> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the angle argument small.
        const auto k2 = static_cast<double>((static_cast<unsigned long long>(k) * k) % (2 * n));
        const double ang = sign * std::numbers::pi * k2 / static_cast<double>(n);
        chirp[k] = {std::cos(ang), std::sin(ang)};
    }
    std::vector<Complex> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
    radix2(a, false);
    radix2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    radix2(a, true);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * scale * chirp[k];
}

void transform(std::vector<Complex>& data, bool inverse) {
    if (data.empty()) throw InvalidArgument("fft: empty input");
    if (data.size() == 1) return;
    if (is_pow2(data.size()))
        radix2(data, inverse);
    else
        bluestein(data, inverse);
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(std::vector<Complex>& data) { transform(data, false); }

void ifft_inplace(std::vector<Complex>& data) {
    transform(data, true);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= scale;
}

Spectrum fft_real(std::span<const double> signal) {
    if (signal.empty()) throw InvalidArgument("fft_real: empty input");
    Spectrum out(next_pow2(signal.size()));
    for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i];
    fft_inplace(out);
    return out;
}

std::vector<double> ifft_real(const Spectrum& spectrum, std::size_t length) {
    if (length > spectrum.size()) throw InvalidArgument("ifft_real: length exceeds spectrum size");
    Spectrum tmp = spectrum;
    ifft_inplace(tmp);
    std::vector<double> out(length);
    for (std::size_t i = 0; i < length; ++i) out[i] = tmp[i].real();
    return out;
}

Spectrum fftshift(const Spectrum& x) {
    const std::size_t n = x.size();
    const std::size_t shift = n / 2;
    Spectrum out(n);
    for (std::size_t i = 0; i < n; ++i) out[(i + shift) % n] = x[i];
    return out;
}

Spectrum ifftshift(const Spectrum& x) {
    const std::size_t n = x.size();
    const std::size_t shift = n - n / 2;
    Spectrum out(n);
    for (std::size_t i = 0; i < n; ++i) out[(i + shift) % n] = x[i];
    return out;
}

}  // namespace vsxc
