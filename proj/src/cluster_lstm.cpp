#include "vsxc/cluster_lstm.hpp"

#include <cmath>
#include <numeric>

#include "vsxc/error.hpp"
#include "vsxc/parallel.hpp"
#include "vsxc/stattests.hpp"

namespace vsxc {

WindowSet make_windows(std::span<const double> series, std::size_t length) {
    if (length == 0) throw InvalidArgument("make_windows: window length must be >= 1");
    if (series.size() <= length)
        throw InvalidArgument("make_windows: series of length " + std::to_string(series.size()) +
                              " is too short for window " + std::to_string(length) + " (need one target)");
    WindowSet ws;
    ws.length = length;
    const std::size_t count = series.size() - length;
    ws.windows.reserve(count);
    ws.next_values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ws.windows.emplace_back(series.begin() + static_cast<std::ptrdiff_t>(i),
                                series.begin() + static_cast<std::ptrdiff_t>(i + length));
        ws.next_values.push_back(series[i + length]);
    }
    return ws;
}

WindowSet make_windows(const TimeSeries& series, std::size_t length) { return make_windows(series.values(), length); }

void ClusterLstmConfig::validate() const {
    if (k == 0) throw InvalidArgument("clusterlstm: k must be >= 1");
    if (window == 0) throw InvalidArgument("clusterlstm: window must be >= 1");
    if (hidden == 0 || layers == 0) throw InvalidArgument("clusterlstm: hidden and layers must be >= 1");
    if (epochs < 0) throw InvalidArgument("clusterlstm: epochs must be >= 0");
    if (!(learning_rate > 0.0)) throw InvalidArgument("clusterlstm: learning_rate must be positive");
}

namespace {

ZStats zstats(std::span<const double> v) {
    const auto n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    return {mean, sd > 1e-12 ? sd : 1.0};
}

std::vector<double> normalize(std::span<const double> v, const ZStats& z) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - z.mean) / z.std;
    return out;
}

}  // namespace

std::size_t ClusterLstmModel::route(std::span<const double> raw) const {
    return kmeans.nearest(normalize(raw, global));
}

double ClusterLstmModel::predict_next(std::span<const double> raw) const {
    if (raw.size() != window)
        throw InvalidArgument("clusterlstm: expected a window of " + std::to_string(window) + " values");
    const std::size_t c = route(raw);
    const auto& z = cluster_norm[c];
    return lstm_forward(lstms[c], normalize(raw, z)) * z.std + z.mean;
}

ClusterLstmModel clusterlstm_train(const WindowSet& ws, const ClusterLstmConfig& cfg) {
    cfg.validate();
    if (ws.size() == 0 || ws.length != cfg.window)
        throw InvalidArgument("clusterlstm: window set is empty or its length differs from the configured window");
    if (ws.size() < cfg.k)
        throw InvalidArgument("clusterlstm: " + std::to_string(ws.size()) + " windows is fewer than k = " +
                              std::to_string(cfg.k));

    std::vector<double> series(ws.windows[0]);
    series.insert(series.end(), ws.next_values.begin(), ws.next_values.end());

    ClusterLstmModel m;
    m.window = cfg.window;
    m.global = zstats(series);
    if (series.size() > 2) m.gate_p_value = ljung_box(series, 1).p_value;
    if (!cfg.force && !(m.gate_p_value < 0.05))
        throw InvalidArgument("clusterlstm: residual passes as white noise (Ljung-Box lag-1 p = " +
                              std::to_string(m.gate_p_value) + "); nothing to learn, use --force to train anyway");

    std::vector<std::vector<double>> normed;
    normed.reserve(ws.size());
    for (const auto& w : ws.windows) normed.push_back(normalize(w, m.global));
    m.kmeans = kmeans_fit(normed, cfg.k, cfg.seed);

    std::vector<std::vector<std::size_t>> members(cfg.k);
    for (std::size_t i = 0; i < ws.size(); ++i) members[m.kmeans.labels[i]].push_back(i);
    for (std::size_t c = 0; c < cfg.k; ++c)
        if (members[c].size() < cfg.min_cluster_size)
            throw InvalidArgument("clusterlstm: cluster " + std::to_string(c) + " has only " +
                                  std::to_string(members[c].size()) + " windows (minimum " +
                                  std::to_string(cfg.min_cluster_size) + "); try a smaller k");

    m.cluster_norm.resize(cfg.k);
    m.lstms.resize(cfg.k);
    m.traces.resize(cfg.k);
    AdamConfig adam;
    adam.learning_rate = cfg.learning_rate;
    adam.epochs = cfg.epochs;
    parallel_for(
        cfg.k,
        [&](std::size_t c) {
            std::vector<double> pooled;
            for (std::size_t i : members[c]) pooled.insert(pooled.end(), ws.windows[i].begin(), ws.windows[i].end());
            const ZStats z = zstats(pooled);
            std::vector<std::vector<double>> xs;
            std::vector<double> ys;
            for (std::size_t i : members[c]) {
                xs.push_back(normalize(ws.windows[i], z));
                ys.push_back((ws.next_values[i] - z.mean) / z.std);
            }
            auto w = lstm_init(1, cfg.hidden, cfg.layers, cfg.seed + 1000003ULL * (c + 1));
            m.traces[c] = lstm_train(w, xs, ys, adam);
            m.cluster_norm[c] = z;
            m.lstms[c] = std::move(w);
        },
        cfg.threads);
    return m;
}

std::vector<double> clusterlstm_predict(const ClusterLstmModel& model, std::span<const double> recent,
                                        std::size_t horizon, PredictCounters* counters) {
    if (recent.size() < model.window)
        throw InvalidArgument("clusterlstm_predict: need at least " + std::to_string(model.window) + " values of history");
    std::vector<double> buf(recent.end() - static_cast<std::ptrdiff_t>(model.window), recent.end());
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        const std::span<const double> win(buf.data() + h, model.window);
        const double y = model.predict_next(win);
        if (counters) {
            ++counters->centroid_lookups;
            ++counters->forward_passes;
        }
        out.push_back(y);
        buf.push_back(y);
    }
    return out;
}

std::vector<double> clusterlstm_one_step(const ClusterLstmModel& model, std::span<const double> series) {
    std::vector<double> out;
    for (std::size_t t = model.window; t < series.size(); ++t)
        out.push_back(model.predict_next(series.subspan(t - model.window, model.window)));
    return out;
}

}  // namespace vsxc
