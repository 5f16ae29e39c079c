#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vsxc {

inline constexpr std::int64_t kHourSeconds = 3600;

/// Uniformly sampled scalar series. Immutable once constructed; the
/// constructor enforces equal lengths, strictly increasing timestamps and
/// finite values.
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(std::vector<std::int64_t> timestamps, std::vector<double> values);

    /// Timestamps synthesized as `start + i * step`.
    static TimeSeries from_values(std::vector<double> values, std::int64_t start = 0,
                                  std::int64_t step = kHourSeconds);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const std::int64_t> timestamps() const noexcept { return timestamps_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    /// Same timestamps, new values (length must match).
    [[nodiscard]] TimeSeries with_values(std::vector<double> values) const;
    /// Half-open sub-range [begin, end).
    [[nodiscard]] TimeSeries slice(std::size_t begin, std::size_t end) const;
    /// Step between the last two samples, or one hour for length < 2.
    [[nodiscard]] std::int64_t step() const noexcept;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<std::int64_t> timestamps_;
    std::vector<double> values_;
};

struct SplitSeries {
    TimeSeries train;
    TimeSeries test;
    double ratio = 0.0;
};

struct MetricsReport {
    double rmse = 0.0;
    std::optional<double> mape;  // empty when a target element is zero
    std::size_t n = 0;
};

/// Reads a CSV with a header row. The `timestamp` column is optional
/// (epoch seconds or ISO-8601); without it, row i gets i * 3600.
TimeSeries load_csv(const std::filesystem::path& path, const std::string& value_column);
TimeSeries parse_csv(const std::string& text, const std::string& value_column);

/// Writes `timestamp,<column>` rows; extra columns are appended in order.
void write_csv(const std::filesystem::path& path, const TimeSeries& series,
               const std::string& value_column = "value");
void write_csv(const std::filesystem::path& path, std::span<const std::int64_t> timestamps,
               const std::vector<std::string>& columns,
               const std::vector<std::span<const double>>& data);

/// Parses epoch seconds or an ISO-8601 date-time (`YYYY-MM-DD[T ]HH:MM[:SS][Z]`).
std::int64_t parse_timestamp(const std::string& text);

/// Chronological split with train size floor(ratio * n).
SplitSeries split(const TimeSeries& series, double ratio);
/// Chronological split at an explicit train length.
SplitSeries split_at(const TimeSeries& series, std::size_t train_size);

[[nodiscard]] double rmse(std::span<const double> pred, std::span<const double> target);
[[nodiscard]] double mape(std::span<const double> pred, std::span<const double> target);
[[nodiscard]] MetricsReport evaluate(std::span<const double> pred, std::span<const double> target);

}  // namespace vsxc
