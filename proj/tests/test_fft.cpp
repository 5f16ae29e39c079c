#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "vsxc/fft.hpp"

using namespace vsxc;

namespace {

double max_abs_diff(const Spectrum& a, const Spectrum& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Spectrum random_signal(std::size_t n, std::uint64_t seed) {
    const auto re = oracle::white_noise(n, 1.0, seed);
    const auto im = oracle::white_noise(n, 1.0, seed + 100);
    Spectrum x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = {re[i], im[i]};
    return x;
}

}  // namespace

TEST_CASE("matches the naive DFT for powers of two and other lengths") {
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 12u, 17u, 64u, 100u, 256u}) {
        auto x = random_signal(n, n);
        const auto ref = oracle::naive_dft(x);
        fft_inplace(x);
        CHECK(max_abs_diff(x, ref) < 1e-9);
    }
}

TEST_CASE("impulse gives a flat spectrum") {
    const std::vector<double> x{1, 0, 0, 0};
    for (const auto& c : fft_real(x)) CHECK(std::abs(std::abs(c) - 1.0) < 1e-15);
}

TEST_CASE("constant signal puts all energy in bin 0") {
    const std::vector<double> x{2.5, 2.5, 2.5, 2.5};
    const auto s = fft_real(x);
    CHECK(std::abs(s[0] - Complex(10.0, 0.0)) < 1e-12);
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(std::abs(s[k]) < 1e-12);
}

TEST_CASE("cosine energy lands in bins +-k") {
    std::vector<double> x(8);
    for (std::size_t n = 0; n < 8; ++n) x[n] = std::cos(2.0 * std::numbers::pi * 2.0 * static_cast<double>(n) / 8.0);
    const auto s = fft_real(x);
    for (std::size_t k = 0; k < 8; ++k) {
        if (k == 2 || k == 6) CHECK(std::abs(s[k]) == doctest::Approx(4.0));
        else CHECK(std::abs(s[k]) < 1e-12);
    }
}

TEST_CASE("real input spectra are Hermitian") {
    const auto x = oracle::white_noise(64, 1.0, 9);
    const auto s = fft_real(x);
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(std::abs(s[k] - std::conj(s[s.size() - k])) < 1e-12);
}

TEST_CASE("inverse round trip") {
    for (std::size_t n : {7u, 16u, 30u, 1000u}) {
        auto x = random_signal(n, 3 * n);
        const auto orig = x;
        fft_inplace(x);
        ifft_inplace(x);
        CHECK(max_abs_diff(x, orig) < 1e-10);
    }
    const auto r = oracle::white_noise(100, 1.0, 1);
    const auto back = ifft_real(fft_real(r), r.size());
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(back[i] - r[i]) < 1e-12);
}

TEST_CASE("shift helpers") {
    CHECK(next_pow2(1) == 1);
    CHECK(next_pow2(5) == 8);
    CHECK(next_pow2(1024) == 1024);
    Spectrum x{0, 1, 2, 3, 4};
    const auto s = fftshift(x);
    CHECK(s[2] == Complex(0.0));
    CHECK(ifftshift(s) == x);
}
