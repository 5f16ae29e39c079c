#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vsxc/cluster_lstm.hpp"
#include "vsxc/ga.hpp"
#include "vsxc/gbt.hpp"
#include "vsxc/kalman.hpp"
#include "vsxc/segsigmoid.hpp"
#include "vsxc/series.hpp"
#include "vsxc/stattests.hpp"
#include "vsxc/synthetic.hpp"
#include "vsxc/vmd.hpp"

namespace vsxc {

enum class PeriodicModel { gbt, persistence };
enum class ResidualModel { clusterlstm, single_lstm, zero };

[[nodiscard]] std::string to_string(PeriodicModel m);
[[nodiscard]] std::string to_string(ResidualModel m);
[[nodiscard]] PeriodicModel parse_periodic_model(const std::string& s);
[[nodiscard]] ResidualModel parse_residual_model(const std::string& s);

struct PipelineConfig {
    /// CSV input; when empty the synthetic generator supplies the data.
    std::optional<std::filesystem::path> input;
    std::string value_column = "value";
    SyntheticSpec synthetic;

    KalmanConfig kalman;
    bool skip_kalman = false;
    double split_ratio = 0.9;
    std::optional<std::size_t> split_index;
    std::optional<std::size_t> test_size;  ///< cap on the evaluated horizon after the split

    VmdParams vmd;
    GaConfig ga;
    bool skip_ga = true;

    TrendConfig trend;
    GbtConfig gbt;
    std::size_t lag = kDefaultLag;
    ClusterLstmConfig residual;

    PeriodicModel periodic_model = PeriodicModel::gbt;
    ResidualModel residual_model = ResidualModel::clusterlstm;

    std::uint64_t seed = 0;
    std::size_t granger_lag = kDefaultLag;

    /// Seeds every stochastic stage from `seed`.
    void apply_seed();
    void validate() const;
};

struct Diagnostic {
    std::string name;       ///< e.g. "mann_kendall(T)"
    TestResult result;
    bool warning = false;   ///< the null hypothesis was not rejected
    std::string message;
};

struct ComponentForecast {
    std::vector<double> trend;
    std::vector<double> periodic;
    std::vector<double> residual;
    std::vector<double> total;
};

struct ForecastReport {
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::vector<std::int64_t> test_timestamps;

    ComponentForecast forecast;
    ComponentForecast reference;  ///< test part of a decomposition of the full filtered series
    std::vector<double> target;   ///< filtered test observations

    MetricsReport trend_metrics;
    MetricsReport periodic_metrics;
    MetricsReport residual_metrics;
    MetricsReport total_metrics;
    MetricsReport baseline_metrics;  ///< last training value carried forward

    double alpha = 0.0;
    double tau = 0.0;
    std::optional<GaResult> ga;
    std::array<double, 3> center_freqs{};
    double recon_mse = 0.0;
    int vmd_iterations = 0;
    std::size_t n_changepoints = 0;
    std::size_t gbt_rounds = 0;

    std::vector<Diagnostic> diagnostics;
    std::map<std::string, double> timings;  ///< seconds per stage
    std::vector<std::string> warnings;
};

/// Everything shared by the forecasting arms: filtered series, split,
/// decomposition of the training part, diagnostics and the fitted trend.
struct PreparedData {
    TimeSeries observed;
    TimeSeries filtered;
    SplitSeries split;
    Decomposition decomposition;
    Decomposition reference;  ///< decomposition of the whole filtered series
    double alpha = 0.0;
    double tau = 0.0;
    std::optional<GaResult> ga;
    std::vector<Diagnostic> diagnostics;
    TrendFitReport trend;
    std::vector<double> trend_forecast;
    std::map<std::string, double> timings;
};

[[nodiscard]] TimeSeries load_input(const PipelineConfig& cfg);

[[nodiscard]] std::vector<Diagnostic> run_diagnostics(const Decomposition& d, const TimeSeries& y,
                                                      std::size_t granger_lag);

/// Runs every stage up to and including the trend fit.
[[nodiscard]] PreparedData prepare(const PipelineConfig& cfg);

[[nodiscard]] std::vector<double> forecast_periodic_component(const PreparedData& p, const PipelineConfig& cfg,
                                                              PeriodicModel model,
                                                              std::span<const double> residual_forecast,
                                                              std::size_t* rounds = nullptr);
[[nodiscard]] std::vector<double> forecast_residual_component(const PreparedData& p, const PipelineConfig& cfg,
                                                              ResidualModel model);

/// Combines component forecasts and scores them.
[[nodiscard]] ForecastReport assemble_report(const PreparedData& p, std::vector<double> trend,
                                             std::vector<double> periodic, std::vector<double> residual);

[[nodiscard]] ForecastReport run_pipeline(const PipelineConfig& cfg);

struct AblationCell {
    PeriodicModel periodic;
    ResidualModel residual;
    MetricsReport total;
    MetricsReport periodic_metrics;
    MetricsReport residual_metrics;
};

struct AblationReport {
    std::vector<AblationCell> cells;  ///< {gbt, persistence} x {clusterlstm, single_lstm}
    MetricsReport trend_metrics;
    MetricsReport baseline_metrics;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

[[nodiscard]] AblationReport run_ablation(const PipelineConfig& cfg);

struct RollingFold {
    std::size_t train_size = 0;
    MetricsReport total;
    MetricsReport baseline;
};

/// Rolling-origin evaluation: the split index advances by one test length per
/// fold, ending at the configured split.
[[nodiscard]] std::vector<RollingFold> rolling_origin(const PipelineConfig& cfg, std::size_t folds);

}  // namespace vsxc
