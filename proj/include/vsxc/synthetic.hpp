#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vsxc/series.hpp"

namespace vsxc {

/// y_t = cubic(u) + A sin(2 pi (t + phase) / period) + AR(1) + noise, with
/// u = t / (length - 1). The AR innovation scale can switch between two
/// levels in fixed-length blocks.
struct SyntheticSpec {
    std::size_t length = 2426;
    std::array<double, 4> cubic{10.0, 4.0, -3.0, 2.0};  ///< c0 + c1 u + c2 u^2 + c3 u^3
    double amplitude = 1.0;
    double period = 24.0;
    double phase = 0.5;  ///< in samples; keeps the sinusoid off zero at sample points
    double ar_phi = 0.8;
    double ar_sigma = 0.1;
    double noise_sigma = 0.02;
    bool regime_switching = false;
    double regime_low = 0.2;   ///< multiplier on ar_sigma in the calm regime
    double regime_high = 2.0;  ///< multiplier on ar_sigma in the volatile regime
    std::size_t regime_block = 150;
    bool unit_variance = false;  ///< divide every component by std(y)
    std::uint64_t seed = 0;
    std::int64_t start = 0;
    std::int64_t step = kHourSeconds;

    void validate() const;
};

struct SyntheticData {
    TimeSeries y;
    std::vector<double> trend;
    std::vector<double> periodic;
    std::vector<double> ar;
    std::vector<double> noise;
    double scale = 1.0;  ///< divisor applied when unit_variance is set
};

[[nodiscard]] SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// AR(1) with regime-switching innovation scale, for residual-model studies.
[[nodiscard]] std::vector<double> regime_ar1(std::size_t length, double phi, double sigma_low, double sigma_high,
                                             std::size_t block, std::uint64_t seed);

}  // namespace vsxc
