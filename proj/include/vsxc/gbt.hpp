#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vsxc/series.hpp"
#include "vsxc/vmd.hpp"

namespace vsxc {

inline constexpr std::size_t kDefaultLag = 48;

/// Supervised rows for the periodic model. Column j * lag + (i - 1) holds
/// component j at t - i, with components ordered T, S, R, y; the target is S_t.
struct LagMatrix {
    std::size_t lag = 0;
    std::size_t n_features = 0;
    std::vector<double> features;  ///< row-major, rows() x n_features
    std::vector<double> targets;

    [[nodiscard]] std::size_t rows() const noexcept { return targets.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return std::span<const double>(features).subspan(r * n_features, n_features);
    }
};

[[nodiscard]] LagMatrix build_lag_matrix(std::span<const double> trend, std::span<const double> periodic,
                                         std::span<const double> residual, std::span<const double> y,
                                         std::size_t lag = kDefaultLag);
[[nodiscard]] LagMatrix build_lag_matrix(const Decomposition& decomp, const TimeSeries& y,
                                         std::size_t lag = kDefaultLag);

/// Feature vector for time index t (t >= lag) over the given component histories.
[[nodiscard]] std::vector<double> lag_features(std::span<const double> trend, std::span<const double> periodic,
                                               std::span<const double> residual, std::span<const double> y,
                                               std::size_t t, std::size_t lag);

struct TreeNode {
    int feature = -1;  ///< -1 for leaves
    double threshold = 0.0;  ///< rows with x[feature] < threshold go left
    int left = -1;
    int right = -1;
    double weight = 0.0;  ///< leaf output, -G / (H + lambda)
    double grad_sum = 0.0;
    double hess_sum = 0.0;
    // Split statistics, kept so the chosen gain can be audited after fitting.
    double gain = 0.0;
    double left_grad = 0.0;
    double left_hess = 0.0;
    double right_grad = 0.0;
    double right_hess = 0.0;

    [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root
    [[nodiscard]] double predict(std::span<const double> x) const;
    /// Features referenced by any split.
    [[nodiscard]] std::vector<int> used_features() const;
};

struct GbtConfig {
    int max_depth = 4;
    double learning_rate = 0.1;
    int n_rounds = 300;
    double lambda = 1.0;
    double gamma = 0.0;
    int early_stopping_rounds = 30;  ///< 0 disables early stopping
    double validation_fraction = 0.1;
    unsigned threads = 0;

    void validate() const;
};

struct GbtModel {
    std::vector<RegressionTree> trees;
    double learning_rate = 0.1;
    double base_score = 0.0;
    double lambda = 1.0;
    double gamma = 0.0;
    int max_depth = 4;
    int n_rounds = 0;
    std::size_t n_features = 0;
};

struct GbtFit {
    GbtModel model;
    std::vector<double> train_predictions;  ///< per input row, accumulated during fitting
    std::vector<double> loss_history;       ///< training MSE after each round (index 0: base score only)
    std::vector<double> validation_history;
    std::size_t train_rows = 0;             ///< rows used for tree growing (excludes the validation tail)
};

/// Split gain of the squared-error second-order objective.
[[nodiscard]] double split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                                double grad_total, double hess_total, double lambda, double gamma) noexcept;

[[nodiscard]] GbtFit gbt_fit(std::span<const double> features, std::size_t n_features, std::span<const double> targets,
                             const GbtConfig& cfg = {});
[[nodiscard]] GbtFit gbt_fit(const LagMatrix& m, const GbtConfig& cfg = {});

[[nodiscard]] double gbt_predict(const GbtModel& model, std::span<const double> features);

/// Recursive multi-step forecast of S. Step h uses the history plus the
/// previously forecast S values; T and R lags after the history come from
/// `trend_future` / `residual_future`, and y lags from T + S + R forecasts.
[[nodiscard]] std::vector<double> forecast_periodic(const GbtModel& model, std::span<const double> trend_hist,
                                                    std::span<const double> periodic_hist,
                                                    std::span<const double> residual_hist,
                                                    std::span<const double> y_hist,
                                                    std::span<const double> trend_future,
                                                    std::span<const double> residual_future, std::size_t horizon,
                                                    std::size_t lag = kDefaultLag);

}  // namespace vsxc
