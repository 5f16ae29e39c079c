#include "vsxc/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "vsxc/error.hpp"

namespace vsxc {

void SyntheticSpec::validate() const {
    if (length < 200) throw InvalidArgument("synth: length must be >= 200");
    if (!(period > 0.0)) throw InvalidArgument("synth: period must be positive");
    if (!(std::abs(ar_phi) < 1.0)) throw InvalidArgument("synth: |ar_phi| must be < 1");
    if (ar_sigma < 0.0 || noise_sigma < 0.0) throw InvalidArgument("synth: noise levels must be >= 0");
    if (regime_switching && (regime_block == 0 || regime_low < 0.0 || regime_high < 0.0))
        throw InvalidArgument("synth: invalid regime settings");
    if (step <= 0) throw InvalidArgument("synth: step must be positive");
}

namespace {

// Regime of each block is drawn independently with probability 1/2.
std::vector<double> ar_path(std::size_t n, double phi, double sigma, bool switching, double low, double high,
                            std::size_t block, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> out(n);
    double x = 0.0;
    double scale = sigma;
    for (std::size_t i = 0; i < n; ++i) {
        if (switching && i % block == 0) scale = sigma * (coin(rng) ? high : low);
        x = phi * x + scale * gauss(rng);
        out[i] = x;
    }
    return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n = spec.length;
    std::mt19937_64 rng(spec.seed);
    SyntheticData d;
    d.trend.resize(n);
    d.periodic.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        const auto& c = spec.cubic;
        d.trend[i] = c[0] + u * (c[1] + u * (c[2] + u * c[3]));
        d.periodic[i] =
            spec.amplitude * std::sin(2.0 * std::numbers::pi * (static_cast<double>(i) + spec.phase) / spec.period);
    }
    d.ar = ar_path(n, spec.ar_phi, spec.ar_sigma, spec.regime_switching, spec.regime_low, spec.regime_high,
                   spec.regime_block, rng);
    d.noise.resize(n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : d.noise) v = spec.noise_sigma * gauss(rng);

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = d.trend[i] + d.periodic[i] + d.ar[i] + d.noise[i];
    if (spec.unit_variance) {
        const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
        double ss = 0.0;
        for (double v : y) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        if (!(sd > 0.0)) throw InvalidArgument("synth: cannot scale a constant series to unit variance");
        d.scale = sd;
        for (auto* comp : {&y, &d.trend, &d.periodic, &d.ar, &d.noise})
            for (auto& v : *comp) v /= sd;
    }
    std::vector<std::int64_t> ts(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = spec.start + static_cast<std::int64_t>(i) * spec.step;
    d.y = TimeSeries(std::move(ts), std::move(y));
    return d;
}

std::vector<double> regime_ar1(std::size_t length, double phi, double sigma_low, double sigma_high, std::size_t block,
                               std::uint64_t seed) {
    if (block == 0) throw InvalidArgument("regime_ar1: block must be >= 1");
    if (!(std::abs(phi) < 1.0)) throw InvalidArgument("regime_ar1: |phi| must be < 1");
    std::mt19937_64 rng(seed);
    return ar_path(length, phi, 1.0, true, sigma_low, sigma_high, block, rng);
}

}  // namespace vsxc
