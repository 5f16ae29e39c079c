#include "vsxc/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vsxc/error.hpp"
#include "vsxc/parallel.hpp"

namespace vsxc {

LagMatrix build_lag_matrix(std::span<const double> trend, std::span<const double> periodic,
                           std::span<const double> residual, std::span<const double> y, std::size_t lag) {
    const std::size_t n = y.size();
    if (trend.size() != n || periodic.size() != n || residual.size() != n)
        throw InvalidArgument("build_lag_matrix: component lengths differ");
    if (lag == 0) throw InvalidArgument("build_lag_matrix: lag must be >= 1");
    if (lag >= n) throw InvalidArgument("build_lag_matrix: lag must be smaller than the series length");
    LagMatrix m;
    m.lag = lag;
    m.n_features = 4 * lag;
    m.features.reserve((n - lag) * m.n_features);
    m.targets.reserve(n - lag);
    for (std::size_t t = lag; t < n; ++t) {
        const auto row = lag_features(trend, periodic, residual, y, t, lag);
        m.features.insert(m.features.end(), row.begin(), row.end());
        m.targets.push_back(periodic[t]);
    }
    return m;
}

LagMatrix build_lag_matrix(const Decomposition& d, const TimeSeries& y, std::size_t lag) {
    return build_lag_matrix(d.trend.values(), d.periodic.values(), d.residual.values(), y.values(), lag);
}

std::vector<double> lag_features(std::span<const double> trend, std::span<const double> periodic,
                                 std::span<const double> residual, std::span<const double> y, std::size_t t,
                                 std::size_t lag) {
    if (t < lag) throw InvalidArgument("lag_features: not enough history");
    const std::span<const double> comps[4] = {trend, periodic, residual, y};
    std::vector<double> row(4 * lag);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 1; i <= lag; ++i) row[j * lag + i - 1] = comps[j][t - i];
    return row;
}

double RegressionTree::predict(std::span<const double> x) const {
    std::size_t id = 0;
    while (!nodes[id].is_leaf()) {
        const auto& nd = nodes[id];
        id = static_cast<std::size_t>(x[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right);
    }
    return nodes[id].weight;
}

std::vector<int> RegressionTree::used_features() const {
    std::vector<int> out;
    for (const auto& nd : nodes)
        if (!nd.is_leaf()) out.push_back(nd.feature);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void GbtConfig::validate() const {
    if (max_depth < 0) throw InvalidArgument("gbt: max_depth must be >= 0");
    if (!(learning_rate > 0.0)) throw InvalidArgument("gbt: learning_rate must be positive");
    if (n_rounds < 0) throw InvalidArgument("gbt: n_rounds must be >= 0");
    if (!(lambda >= 0.0)) throw InvalidArgument("gbt: lambda must be >= 0");
    if (!(gamma >= 0.0)) throw InvalidArgument("gbt: gamma must be >= 0");
    if (early_stopping_rounds < 0) throw InvalidArgument("gbt: early_stopping_rounds must be >= 0");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        throw InvalidArgument("gbt: validation_fraction must lie in [0, 1)");
}

double split_gain(double gl, double hl, double gr, double hr, double g, double h, double lambda,
                  double gamma) noexcept {
    return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda)) - gamma;
}

namespace {

struct Candidate {
    double gain = 0.0;
    double threshold = 0.0;
    double gl = 0.0;
    double hl = 0.0;
    bool valid = false;
};

// Grows one tree on the rows in `rows` (training subset) with gradients g
// (hessians are all 1 for squared error).
RegressionTree grow_tree(std::span<const double> x, std::size_t nf, const std::vector<std::vector<std::uint32_t>>& order,
                         const std::vector<double>& grad, const std::vector<char>& in_train, const GbtConfig& cfg) {
    const std::size_t n = grad.size();
    RegressionTree tree;
    tree.nodes.emplace_back();
    std::vector<int> node_of(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (in_train[i]) {
            node_of[i] = 0;
            tree.nodes[0].grad_sum += grad[i];
            tree.nodes[0].hess_sum += 1.0;
        }

    std::vector<int> open{0};
    for (int depth = 0; depth < cfg.max_depth && !open.empty(); ++depth) {
        std::vector<int> slot_of(tree.nodes.size(), -1);
        for (std::size_t s = 0; s < open.size(); ++s) slot_of[static_cast<std::size_t>(open[s])] = static_cast<int>(s);
        const std::size_t n_open = open.size();

        // best[f][slot]
        std::vector<std::vector<Candidate>> best(nf, std::vector<Candidate>(n_open));
        parallel_for(
            nf,
            [&](std::size_t f) {
                std::vector<double> gl(n_open, 0.0), hl(n_open, 0.0), last(n_open, 0.0);
                std::vector<char> seen(n_open, 0);
                auto& out = best[f];
                for (std::uint32_t row : order[f]) {
                    const int node = node_of[row];
                    if (node < 0) continue;
                    const int slot = slot_of[static_cast<std::size_t>(node)];
                    if (slot < 0) continue;
                    const auto s = static_cast<std::size_t>(slot);
                    const double v = x[row * nf + f];
                    if (seen[s] && v > last[s]) {
                        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
                        const double gr = nd.grad_sum - gl[s];
                        const double hr = nd.hess_sum - hl[s];
                        const double gain =
                            split_gain(gl[s], hl[s], gr, hr, nd.grad_sum, nd.hess_sum, cfg.lambda, cfg.gamma);
                        if (gain > 0.0 && (!out[s].valid || gain > out[s].gain)) {
                            double thr = last[s] + 0.5 * (v - last[s]);
                            if (!(thr > last[s])) thr = v;
                            out[s] = {gain, thr, gl[s], hl[s], true};
                        }
                    }
                    gl[s] += grad[row];
                    hl[s] += 1.0;
                    last[s] = v;
                    seen[s] = 1;
                }
            },
            cfg.threads);

        std::vector<int> next_open;
        for (std::size_t s = 0; s < n_open; ++s) {
            // Ties: lowest feature index wins (strict comparison in feature order).
            int best_f = -1;
            Candidate c;
            for (std::size_t f = 0; f < nf; ++f)
                if (best[f][s].valid && (best_f < 0 || best[f][s].gain > c.gain)) {
                    c = best[f][s];
                    best_f = static_cast<int>(f);
                }
            if (best_f < 0) continue;
            const auto id = static_cast<std::size_t>(open[s]);
            const int left = static_cast<int>(tree.nodes.size());
            const int right = left + 1;
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            auto& nd = tree.nodes[id];
            nd.feature = best_f;
            nd.threshold = c.threshold;
            nd.left = left;
            nd.right = right;
            nd.gain = c.gain;
            nd.left_grad = c.gl;
            nd.left_hess = c.hl;
            nd.right_grad = nd.grad_sum - c.gl;
            nd.right_hess = nd.hess_sum - c.hl;
            tree.nodes[static_cast<std::size_t>(left)].grad_sum = c.gl;
            tree.nodes[static_cast<std::size_t>(left)].hess_sum = c.hl;
            tree.nodes[static_cast<std::size_t>(right)].grad_sum = nd.right_grad;
            tree.nodes[static_cast<std::size_t>(right)].hess_sum = nd.right_hess;
            next_open.push_back(left);
            next_open.push_back(right);
        }
        // Route rows of split nodes to their children.
        for (std::size_t i = 0; i < n; ++i) {
            const int node = node_of[i];
            if (node < 0) continue;
            const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
            if (nd.is_leaf()) continue;
            node_of[i] = x[i * nf + static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
        }
        open = std::move(next_open);
    }
    for (auto& nd : tree.nodes)
        if (nd.is_leaf()) nd.weight = -nd.grad_sum / (nd.hess_sum + cfg.lambda);
    return tree;
}

}  // namespace

GbtFit gbt_fit(std::span<const double> x, std::size_t nf, std::span<const double> y, const GbtConfig& cfg) {
    cfg.validate();
    const std::size_t n = y.size();
    if (nf == 0 || x.size() != n * nf) throw InvalidArgument("gbt_fit: feature matrix shape mismatch");
    if (n < 2) throw InvalidArgument("gbt_fit: need at least 2 rows");

    std::size_t n_train = n;
    const bool early = cfg.early_stopping_rounds > 0 && cfg.validation_fraction > 0.0;
    if (early) {
        const auto n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(n)));
        if (n_val >= 1 && n - n_val >= 2) n_train = n - n_val;
    }
    std::vector<char> in_train(n, 0);
    std::fill(in_train.begin(), in_train.begin() + static_cast<std::ptrdiff_t>(n_train), 1);

    // Training rows of each feature sorted by value (ties by row index).
    std::vector<std::vector<std::uint32_t>> order(nf);
    parallel_for(
        nf,
        [&](std::size_t f) {
            auto& o = order[f];
            o.resize(n_train);
            std::iota(o.begin(), o.end(), 0u);
            std::stable_sort(o.begin(), o.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return x[a * nf + f] < x[b * nf + f]; });
        },
        cfg.threads);

    GbtFit fit;
    fit.train_rows = n_train;
    GbtModel& m = fit.model;
    m.learning_rate = cfg.learning_rate;
    m.lambda = cfg.lambda;
    m.gamma = cfg.gamma;
    m.max_depth = cfg.max_depth;
    m.n_features = nf;
    m.base_score = std::accumulate(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_train), 0.0) /
                   static_cast<double>(n_train);

    std::vector<double> pred(n, m.base_score);
    auto train_mse = [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_train; ++i) acc += (pred[i] - y[i]) * (pred[i] - y[i]);
        return acc / static_cast<double>(n_train);
    };
    auto val_mse = [&] {
        double acc = 0.0;
        for (std::size_t i = n_train; i < n; ++i) acc += (pred[i] - y[i]) * (pred[i] - y[i]);
        return acc / static_cast<double>(n - n_train);
    };
    const bool validating = n_train < n;
    fit.loss_history.push_back(train_mse());
    if (validating) fit.validation_history.push_back(val_mse());

    std::vector<double> grad(n);
    double best_val = validating ? fit.validation_history.back() : 0.0;
    std::size_t best_rounds = 0;
    int stagnant = 0;
    for (int round = 0; round < cfg.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];
        auto tree = grow_tree(x, nf, order, grad, in_train, cfg);
        for (std::size_t i = 0; i < n; ++i) pred[i] += m.learning_rate * tree.predict(x.subspan(i * nf, nf));
        m.trees.push_back(std::move(tree));
        fit.loss_history.push_back(train_mse());
        if (validating) {
            const double v = val_mse();
            fit.validation_history.push_back(v);
            if (v < best_val) {
                best_val = v;
                best_rounds = m.trees.size();
                stagnant = 0;
            } else if (++stagnant >= cfg.early_stopping_rounds) {
                break;
            }
        }
    }
    if (validating && best_rounds < m.trees.size()) {
        m.trees.resize(best_rounds);
        std::fill(pred.begin(), pred.end(), m.base_score);
        for (const auto& tree : m.trees)
            for (std::size_t i = 0; i < n; ++i) pred[i] += m.learning_rate * tree.predict(x.subspan(i * nf, nf));
    }
    m.n_rounds = static_cast<int>(m.trees.size());
    fit.train_predictions = std::move(pred);
    return fit;
}

GbtFit gbt_fit(const LagMatrix& m, const GbtConfig& cfg) { return gbt_fit(m.features, m.n_features, m.targets, cfg); }

double gbt_predict(const GbtModel& model, std::span<const double> features) {
    if (features.size() != model.n_features)
        throw InvalidArgument("gbt_predict: expected " + std::to_string(model.n_features) + " features, got " +
                              std::to_string(features.size()));
    double out = model.base_score;
    for (const auto& tree : model.trees) out += model.learning_rate * tree.predict(features);
    return out;
}

std::vector<double> forecast_periodic(const GbtModel& model, std::span<const double> trend_hist,
                                      std::span<const double> periodic_hist, std::span<const double> residual_hist,
                                      std::span<const double> y_hist, std::span<const double> trend_future,
                                      std::span<const double> residual_future, std::size_t horizon, std::size_t lag) {
    const std::size_t n = y_hist.size();
    if (trend_hist.size() != n || periodic_hist.size() != n || residual_hist.size() != n)
        throw InvalidArgument("forecast_periodic: history lengths differ");
    if (n < lag) throw InvalidArgument("forecast_periodic: insufficient history (need >= lag samples)");
    if (trend_future.size() < horizon || residual_future.size() < horizon)
        throw InvalidArgument("forecast_periodic: trend/residual forecasts shorter than the horizon");
    if (model.n_features != 4 * lag) throw InvalidArgument("forecast_periodic: model was trained with a different lag");

    std::vector<double> t(trend_hist.begin(), trend_hist.end());
    std::vector<double> s(periodic_hist.begin(), periodic_hist.end());
    std::vector<double> r(residual_hist.begin(), residual_hist.end());
    std::vector<double> y(y_hist.begin(), y_hist.end());
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        const double s_hat = gbt_predict(model, lag_features(t, s, r, y, t.size(), lag));
        out.push_back(s_hat);
        t.push_back(trend_future[h]);
        s.push_back(s_hat);
        r.push_back(residual_future[h]);
        y.push_back(trend_future[h] + s_hat + residual_future[h]);
    }
    return out;
}

}  // namespace vsxc
