#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "vsxc/series.hpp"

namespace vsxc {

struct VmdParams {
    int k_modes = 3;
    double alpha = 2000.0;   ///< bandwidth penalty (shared by all modes)
    double tau = 0.99877;    ///< dual ascent step; 0 disables the multiplier update
    double tol = 1e-7;
    int max_iter = 500;
    bool dc_mode = true;     ///< pin mode 0 at zero frequency
    bool record_history = false;  ///< keep per-iteration reconstruction MSE (costs one inverse FFT per iteration)

    void validate() const;
};

/// Raw output for an arbitrary number of modes, ordered by ascending centre frequency.
struct VmdResult {
    std::vector<std::vector<double>> modes;
    std::vector<double> center_freqs;  ///< cycles per sample, in [0, 0.5)
    double recon_mse = 0.0;
    int iterations = 0;
    bool hit_max_iter = false;
    std::vector<double> recon_history;  ///< filled when record_history is set
};

/// Trend / periodic / residual triple produced from a 3-mode VMD.
struct Decomposition {
    TimeSeries trend;
    TimeSeries periodic;
    TimeSeries residual;
    std::array<double, 3> center_freqs{};
    double recon_mse = 0.0;
    int iterations = 0;
    bool hit_max_iter = false;
};

/// Variational mode decomposition (ADMM in the frequency domain on the
/// mirror-extended signal).
[[nodiscard]] VmdResult vmd(std::span<const double> signal, const VmdParams& params);

/// Three-mode decomposition labelled trend (lowest centre frequency),
/// periodic and residual. Requires params.k_modes == 3.
[[nodiscard]] Decomposition vmd_decompose(const TimeSeries& series, const VmdParams& params);

/// Elementwise T + S + R.
[[nodiscard]] TimeSeries reconstruct(const Decomposition& d);

[[nodiscard]] double reconstruction_mse(const Decomposition& d, const TimeSeries& input);

}  // namespace vsxc
