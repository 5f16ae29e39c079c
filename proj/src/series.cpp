#include "vsxc/series.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vsxc/error.hpp"

namespace vsxc {

namespace {

std::string trim(std::string_view s) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

template <class Int>
bool parse_int(std::string_view text, Int& out) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

TimeSeries::TimeSeries(std::vector<std::int64_t> timestamps, std::vector<double> values)
    : timestamps_(std::move(timestamps)), values_(std::move(values)) {
    if (timestamps_.size() != values_.size())
        throw InvalidArgument("timestamps and values differ in length (" +
                              std::to_string(timestamps_.size()) + " vs " +
                              std::to_string(values_.size()) + ")");
    for (std::size_t i = 1; i < timestamps_.size(); ++i)
        if (timestamps_[i] <= timestamps_[i - 1])
            throw MonotonicityError(i + 1, "timestamps not strictly increasing");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw InvalidArgument("non-finite value at index " + std::to_string(i));
}

TimeSeries TimeSeries::from_values(std::vector<double> values, std::int64_t start, std::int64_t step) {
    std::vector<std::int64_t> ts(values.size());
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = start + static_cast<std::int64_t>(i) * step;
    return TimeSeries(std::move(ts), std::move(values));
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    return TimeSeries(timestamps_, std::move(values));
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > size()) throw InvalidArgument("slice out of range");
    return TimeSeries({timestamps_.begin() + begin, timestamps_.begin() + end},
                      {values_.begin() + begin, values_.begin() + end});
}

std::int64_t TimeSeries::step() const noexcept {
    if (timestamps_.size() < 2) return kHourSeconds;
    return timestamps_.back() - timestamps_[timestamps_.size() - 2];
}

std::int64_t parse_timestamp(const std::string& raw) {
    const std::string text = trim(raw);
    std::int64_t epoch = 0;
    if (parse_int(text, epoch)) return epoch;

    // YYYY-MM-DD[T ]HH:MM[:SS][Z]
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    auto field = [&](std::size_t pos, std::size_t len, auto& out) {
        return pos + len <= text.size() && parse_int(std::string_view(text).substr(pos, len), out);
    };
    bool ok = text.size() >= 10 && field(0, 4, y) && text[4] == '-' && field(5, 2, mo) &&
              text[7] == '-' && field(8, 2, d);
    std::size_t pos = 10;
    if (ok && text.size() > 10) {
        ok = (text[10] == 'T' || text[10] == ' ') && field(11, 2, h) && text.size() >= 16 &&
             text[13] == ':' && field(14, 2, mi);
        pos = 16;
        if (ok && text.size() > 16 && text[16] == ':') {
            ok = field(17, 2, s);
            pos = 19;
        }
        if (ok && pos < text.size()) ok = (text.substr(pos) == "Z");
    }
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ok || !ymd.ok() || h > 23 || mi > 59 || s > 60)
        throw InvalidArgument("unrecognized timestamp '" + text + "'");
    const auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
    return duration_cast<seconds>(tp.time_since_epoch()).count();
}

TimeSeries parse_csv(const std::string& text, const std::string& value_column) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(0, "missing header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
    const auto header = split_fields(line);

    std::optional<std::size_t> ts_col;
    std::optional<std::size_t> val_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (lower(header[i]) == "timestamp") ts_col = i;
        if (header[i] == value_column) val_col = i;
    }
    if (!val_col) throw ParseError(0, "value column '" + value_column + "' not found in header");

    std::vector<std::int64_t> ts;
    std::vector<double> vals;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto fields = split_fields(line);
        if (*val_col >= fields.size()) throw ParseError(row, "missing value column");
        double v = 0.0;
        if (!parse_double(fields[*val_col], v))
            throw ParseError(row, "cannot parse value '" + fields[*val_col] + "'");
        if (!std::isfinite(v)) throw ParseError(row, "non-finite value");
        if (ts_col) {
            if (*ts_col >= fields.size()) throw ParseError(row, "missing timestamp column");
            std::int64_t t = 0;
            try {
                t = parse_timestamp(fields[*ts_col]);
            } catch (const InvalidArgument& e) {
                throw ParseError(row, e.what());
            }
            if (!ts.empty() && t <= ts.back())
                throw MonotonicityError(row, "timestamp does not increase over previous row");
            ts.push_back(t);
        } else {
            ts.push_back(static_cast<std::int64_t>(row - 1) * kHourSeconds);
        }
        vals.push_back(v);
    }
    return TimeSeries(std::move(ts), std::move(vals));
}

TimeSeries load_csv(const std::filesystem::path& path, const std::string& value_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), value_column);
}

void write_csv(const std::filesystem::path& path, std::span<const std::int64_t> timestamps,
               const std::vector<std::string>& columns,
               const std::vector<std::span<const double>>& data) {
    if (columns.size() != data.size()) throw InvalidArgument("column/data count mismatch");
    for (const auto& d : data)
        if (d.size() != timestamps.size()) throw InvalidArgument("column length mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "timestamp";
    for (const auto& c : columns) out << ',' << c;
    out << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        out << timestamps[i];
        for (const auto& d : data) out << ',' << d[i];
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const TimeSeries& series,
               const std::string& value_column) {
    write_csv(path, series.timestamps(), {value_column}, {series.values()});
}

SplitSeries split_at(const TimeSeries& series, std::size_t train_size) {
    if (series.size() < 2) throw InvalidArgument("series too short to split (need >= 2 samples)");
    if (train_size == 0 || train_size >= series.size())
        throw InvalidArgument("split index " + std::to_string(train_size) +
                              " leaves an empty train or test part");
    return {series.slice(0, train_size), series.slice(train_size, series.size()),
            static_cast<double>(train_size) / static_cast<double>(series.size())};
}

SplitSeries split(const TimeSeries& series, double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");
    if (series.size() < 2) throw InvalidArgument("series too short to split (need >= 2 samples)");
    const auto n_train =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(series.size())));
    auto out = split_at(series, n_train);
    out.ratio = ratio;
    return out;
}

namespace {
void check_pair(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size())
        throw InvalidArgument("prediction/target length mismatch (" + std::to_string(pred.size()) +
                              " vs " + std::to_string(target.size()) + ")");
    if (pred.empty()) throw InvalidArgument("empty input");
}
}  // namespace

double rmse(std::span<const double> pred, std::span<const double> target) {
    check_pair(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

double mape(std::span<const double> pred, std::span<const double> target) {
    check_pair(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (target[i] == 0.0) throw ZeroDivisionError(i);
        acc += std::abs((pred[i] - target[i]) / target[i]);
    }
    return acc / static_cast<double>(pred.size());
}

MetricsReport evaluate(std::span<const double> pred, std::span<const double> target) {
    MetricsReport r;
    r.rmse = rmse(pred, target);
    r.n = pred.size();
    try {
        r.mape = mape(pred, target);
    } catch (const ZeroDivisionError&) {
        r.mape.reset();
    }
    return r;
}

}  // namespace vsxc
