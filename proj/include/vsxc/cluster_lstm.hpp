#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vsxc/kmeans.hpp"
#include "vsxc/lstm.hpp"
#include "vsxc/series.hpp"

namespace vsxc {

inline constexpr std::size_t kDefaultWindow = 24;

struct WindowSet {
    std::size_t length = 0;
    std::vector<std::vector<double>> windows;
    std::vector<double> next_values;

    [[nodiscard]] std::size_t size() const noexcept { return windows.size(); }
};

/// Stride-1 windows with the following value as target.
[[nodiscard]] WindowSet make_windows(std::span<const double> series, std::size_t length = kDefaultWindow);
[[nodiscard]] WindowSet make_windows(const TimeSeries& series, std::size_t length = kDefaultWindow);

struct ClusterLstmConfig {
    std::size_t k = 4;
    std::size_t window = kDefaultWindow;
    std::size_t hidden = 6;
    std::size_t layers = 2;
    int epochs = 200;
    double learning_rate = 1e-2;
    std::uint64_t seed = 0;
    bool force = false;  ///< skip the Ljung-Box gate
    std::size_t min_cluster_size = 5;
    unsigned threads = 0;

    void validate() const;
};

struct ZStats {
    double mean = 0.0;
    double std = 1.0;
};

struct ClusterLstmModel {
    std::size_t window = kDefaultWindow;
    ZStats global;                  ///< applied before clustering
    KMeansModel kmeans;             ///< centroids live in globally normalised space
    std::vector<ZStats> cluster_norm;
    std::vector<LstmWeights> lstms;
    std::vector<TrainTrace> traces;
    double gate_p_value = 0.0;      ///< Ljung-Box lag-1 p-value of the training series

    /// Cluster serving a raw window.
    [[nodiscard]] std::size_t route(std::span<const double> raw_window) const;
    /// One-step prediction from a raw window.
    [[nodiscard]] double predict_next(std::span<const double> raw_window) const;
};

/// Clusters the windows once, then trains one LSTM per cluster on
/// per-cluster z-normalised windows. The residual series is rebuilt from the
/// windows for the white-noise gate.
[[nodiscard]] ClusterLstmModel clusterlstm_train(const WindowSet& windows, const ClusterLstmConfig& cfg);

struct PredictCounters {
    std::size_t centroid_lookups = 0;
    std::size_t forward_passes = 0;
};

/// Recursive forecast: each prediction is appended and the window slides.
[[nodiscard]] std::vector<double> clusterlstm_predict(const ClusterLstmModel& model, std::span<const double> recent,
                                                      std::size_t horizon, PredictCounters* counters = nullptr);

/// One-step-ahead predictions for t = window .. series.size() - 1, each from
/// the observed preceding window.
[[nodiscard]] std::vector<double> clusterlstm_one_step(const ClusterLstmModel& model, std::span<const double> series);

}  // namespace vsxc
