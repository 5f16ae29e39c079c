#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "vsxc/error.hpp"
#include "vsxc/vmd.hpp"

using namespace vsxc;

namespace {

struct Signal {
    std::vector<double> y;
    std::vector<double> sinusoid;
};

// 0.5 t + sin(2 pi 10 n / N) + eps, with t = n / N.
Signal trend_plus_sine(std::size_t n, double sigma, std::uint64_t seed) {
    Signal s;
    const auto eps = oracle::white_noise(n, sigma, seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n);
        const double sine = std::sin(2.0 * std::numbers::pi * 10.0 * static_cast<double>(i) / static_cast<double>(n));
        s.sinusoid.push_back(sine);
        s.y.push_back(0.5 * t + sine + eps[i]);
    }
    return s;
}

double energy(std::span<const double> x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("a pure line stays in the trend mode") {
    const std::size_t n = 2048;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    const auto r = vmd(y, {});
    REQUIRE(r.modes.size() == 3);
    // Share of the energy carried by the modes. The surplus modes settle next
    // to the trend and overlap it, so the share of sum(y^2) is lower.
    const double total = energy(r.modes[0]) + energy(r.modes[1]) + energy(r.modes[2]);
    CHECK(energy(r.modes[0]) / total > 0.99);
    CHECK(energy(r.modes[1]) + energy(r.modes[2]) < 0.01 * energy(y));
}

TEST_CASE("trend plus sinusoid separates") {
    const auto s = trend_plus_sine(2048, 0.01, 42);
    const auto d = vmd_decompose(TimeSeries::from_values(s.y), {});
    CHECK(oracle::pearson(d.periodic.values(), s.sinusoid) > 0.95);
    CHECK(d.recon_mse < 1e-3 * oracle::variance(s.y));
}

TEST_CASE("small alpha with the tuned tau reconstructs any input") {
    VmdParams p;
    p.alpha = 13.625;
    p.tau = 0.99877;
    const std::vector<std::vector<double>> inputs{
        trend_plus_sine(1024, 0.01, 1).y,
        oracle::white_noise(700, 1.0, 2),
        oracle::ar1(900, 0.9, 1.0, 3),
    };
    for (const auto& y : inputs) {
        const auto r = vmd(y, p);
        CHECK(r.recon_mse < oracle::variance(y) * 1e-3);
    }
}

TEST_CASE("reconstruct sums the components") {
    Decomposition d;
    d.trend = TimeSeries::from_values({1, 2});
    d.periodic = TimeSeries::from_values({0, 1});
    d.residual = TimeSeries::from_values({1, 0});
    const auto r = reconstruct(d);
    CHECK(r[0] == 2.0);
    CHECK(r[1] == 3.0);

    Decomposition z;
    z.trend = z.periodic = z.residual = TimeSeries::from_values({0, 0, 0});
    const auto zero = reconstruct(z);
    for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("decomposition invariants") {
    const auto s = trend_plus_sine(600, 0.2, 7);
    const auto in = TimeSeries::from_values(s.y);
    const auto d = vmd_decompose(in, {});
    CHECK(d.trend.size() == in.size());
    CHECK(d.periodic.size() == in.size());
    CHECK(d.residual.size() == in.size());

    double mse = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double e = d.trend[i] + d.periodic[i] + d.residual[i] - in[i];
        mse += e * e;
    }
    mse /= static_cast<double>(in.size());
    CHECK(std::abs(mse - d.recon_mse) < 1e-12);
    CHECK(std::abs(reconstruction_mse(d, in) - d.recon_mse) < 1e-12);

    CHECK(d.center_freqs[0] <= d.center_freqs[1]);
    CHECK(d.center_freqs[1] <= d.center_freqs[2]);
    CHECK(d.center_freqs[0] < 0.5 / static_cast<double>(in.size()));
}

TEST_CASE("modes stay bounded near the edges") {
    const std::vector<std::vector<double>> inputs{
        trend_plus_sine(512, 0.05, 4).y,
        oracle::white_noise(300, 1.0, 5),
        oracle::ar1(400, 0.95, 1.0, 6),
    };
    for (const auto& y : inputs) {
        const auto r = vmd(y, {});
        for (const auto& m : r.modes) CHECK(max_abs(m) <= 3.0 * max_abs(y));
    }
}

TEST_CASE("identical input gives bit-identical output") {
    const auto s = trend_plus_sine(333, 0.1, 8);
    const auto a = vmd(s.y, {});
    const auto b = vmd(s.y, {});
    CHECK(a.modes == b.modes);
    CHECK(a.center_freqs == b.center_freqs);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("reconstruction error settles on converged runs") {
    VmdParams p;
    p.tau = 0.0;
    p.record_history = true;
    const auto s = trend_plus_sine(512, 0.0, 0);
    const auto r = vmd(s.y, p);
    REQUIRE_FALSE(r.hit_max_iter);
    REQUIRE(r.recon_history.size() >= 10);
    const std::size_t n = r.recon_history.size();
    for (std::size_t i = n - 9; i < n; ++i) CHECK(r.recon_history[i] <= r.recon_history[i - 1] + 1e-9);
}

TEST_CASE("arbitrary mode counts are ordered by frequency") {
    VmdParams p;
    p.k_modes = 5;
    const auto r = vmd(oracle::white_noise(256, 1.0, 9), p);
    REQUIRE(r.modes.size() == 5);
    CHECK(std::is_sorted(r.center_freqs.begin(), r.center_freqs.end()));
    for (double w : r.center_freqs) {
        CHECK(w >= 0.0);
        CHECK(w < 0.5);
    }
}

TEST_CASE("parameter validation") {
    const auto y = oracle::white_noise(64, 1.0, 1);
    VmdParams p;
    p.k_modes = 0;
    CHECK_THROWS_AS((void)vmd(y, p), InvalidArgument);
    p = {};
    p.tol = 0.0;
    CHECK_THROWS_AS((void)vmd(y, p), InvalidArgument);
    p = {};
    p.max_iter = 0;
    CHECK_THROWS_AS((void)vmd(y, p), InvalidArgument);
    p = {};
    p.k_modes = 4;
    CHECK_THROWS_AS((void)vmd_decompose(TimeSeries::from_values(y), p), InvalidArgument);
    CHECK_THROWS_AS((void)vmd(std::vector<double>(8, 1.0), VmdParams{}), InvalidArgument);
}
