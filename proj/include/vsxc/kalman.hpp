#pragma once

#include <optional>
#include <vector>

#include "vsxc/series.hpp"

namespace vsxc {

/// Scalar random-walk Kalman filter settings. The defaults are the sensor
/// noise variances used for hourly displacement data.
struct KalmanConfig {
    double process_var = 1.0;           ///< Q
    double measure_var = 16.0;          ///< R
    std::optional<double> init_state;   ///< x0; first observation when empty
    std::optional<double> init_cov;     ///< P0; R when empty
};

struct KalmanTrace {
    std::vector<double> state;  ///< posterior estimate per sample
    std::vector<double> cov;    ///< posterior covariance per sample
    std::vector<double> gain;   ///< gain used at each sample (0 at index 0)
};

/// Forward filter. Sample 0 is the prior (x0, P0); every later sample is a
/// predict (P += Q) followed by a measurement update.
[[nodiscard]] TimeSeries kalman_smooth(const TimeSeries& series, const KalmanConfig& cfg = {});
[[nodiscard]] KalmanTrace kalman_trace(std::span<const double> observations, const KalmanConfig& cfg = {});

/// Fixed point of P = (P + Q) R / (P + Q + R).
[[nodiscard]] double kalman_steady_state_cov(double process_var, double measure_var);

}  // namespace vsxc
