#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vsxc/series.hpp"

namespace vsxc {

/// Numerically stable logistic function; saturates to exactly 0 or 1.
[[nodiscard]] double sigmoid(double z) noexcept;

/// Piecewise-logistic trend
///
///   g(t) = floor + (C - floor) * sigmoid(z(t)),
///   z(t) = (k + a(t).delta) * t + a(t).gamma - k * m
///        = k (t - m) + sum_{s_j <= t} delta_j (t - s_j),
///
/// with a_j(t) = 1[s_j <= t] and gamma_j = -s_j delta_j, which keeps g
/// continuous at every changepoint. All times are normalised so that the
/// training span maps onto [0, 1].
struct SegSigmoidModel {
    double capacity = 1.0;  ///< C, constant in time
    double floor = 0.0;     ///< lower asymptote; 0 for strictly positive training data
    double rate = 0.0;      ///< k
    double offset = 0.0;    ///< m
    std::vector<double> changepoints;  ///< s_j, sorted, normalised time
    std::vector<double> deltas;        ///< rate adjustments
    std::vector<double> gammas;        ///< offset adjustments, -s_j * delta_j
    double laplace_scale = 0.5;
    double cp_range = 0.95;
    std::int64_t time_origin = 0;  ///< epoch seconds of the first training sample
    double time_span = 1.0;        ///< seconds covered by the training set

    [[nodiscard]] double normalize(std::int64_t epoch_seconds) const;
    /// g at a normalised time.
    [[nodiscard]] double evaluate(double t) const;
    /// k + a(t).delta
    [[nodiscard]] double effective_rate(double t) const;
};

struct TrendConfig {
    double alpha = 0.05;           ///< Bonferroni significance level
    double beta = 1.0 / 6.0;       ///< scaling of the Bonferroni critical value
    double cp_range = 0.95;
    double laplace_scale = 0.5;    ///< tau of Laplace(0, tau) on the deltas
    std::optional<double> capacity;
    int max_epochs = 5000;
    double tol = 1e-9;
};

struct TrendFitReport {
    SegSigmoidModel model;
    std::size_t n_changepoints = 0;
    double train_rmse = 0.0;
    std::optional<double> train_mape;
    double final_loss = 0.0;
    int epochs = 0;
    bool converged = false;
};

/// Candidate changepoints: indices whose studentized residual against a
/// cubic base fit exceeds the scaled Bonferroni value, restricted to the first
/// cp_range of the span.
[[nodiscard]] std::vector<std::size_t> detect_changepoints(const TimeSeries& trend, double alpha = 0.05,
                                                           double beta = 1.0 / 6.0, double cp_range = 0.95);

/// MAP fit of (k, m, delta) with the Laplace prior as an L1 penalty:
/// sum (g(t_i) - T_i)^2 + (1 / laplace_scale) * sum |delta_j|.
[[nodiscard]] TrendFitReport fit_segsigmoid(const TimeSeries& trend, std::span<const std::size_t> changepoints,
                                            const TrendConfig& cfg = {});

/// Convenience: detect_changepoints followed by fit_segsigmoid.
[[nodiscard]] TrendFitReport fit_trend(const TimeSeries& trend, const TrendConfig& cfg = {});

/// Forecast at absolute timestamps (epoch seconds). No changepoints are
/// added beyond the training span.
[[nodiscard]] std::vector<double> predict_trend(const SegSigmoidModel& model,
                                                std::span<const std::int64_t> horizon_times);

/// Smooth part of the fit objective and its gradient with respect to
/// (k, m, delta_1..delta_J), evaluated at normalised times `t`.
struct TrendLoss {
    double sse = 0.0;
    double penalty = 0.0;
    std::vector<double> gradient;  ///< d(sse + penalty)/d(k, m, delta); sign(0) = 0
};
[[nodiscard]] TrendLoss segsigmoid_loss(const SegSigmoidModel& model, std::span<const double> t,
                                        std::span<const double> y);

}  // namespace vsxc
