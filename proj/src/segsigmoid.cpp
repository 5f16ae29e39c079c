#include "vsxc/segsigmoid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vsxc/error.hpp"
#include "vsxc/ols.hpp"
#include "vsxc/stattests.hpp"

namespace vsxc {

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double SegSigmoidModel::normalize(std::int64_t epoch_seconds) const {
    return static_cast<double>(epoch_seconds - time_origin) / time_span;
}

double SegSigmoidModel::effective_rate(double t) const {
    double r = rate;
    for (std::size_t j = 0; j < changepoints.size() && changepoints[j] <= t; ++j) r += deltas[j];
    return r;
}

double SegSigmoidModel::evaluate(double t) const {
    double z = rate * (t - offset);
    for (std::size_t j = 0; j < changepoints.size() && changepoints[j] <= t; ++j)
        z += deltas[j] * t + gammas[j];
    return floor + (capacity - floor) * sigmoid(z);
}

namespace {

// Parameters in the linear form z = k t + b + sum_{s_j <= t} delta_j (t - s_j),
// b = -k m. The objective is better conditioned in (k, b) than in (k, m).
struct LinearParams {
    double k = 0.0;
    double b = 0.0;
    std::vector<double> delta;
};

struct Problem {
    std::span<const double> t;  // sorted ascending
    std::span<const double> y;
    std::span<const double> s;  // sorted ascending
    double capacity;
    double floor;
};

// SSE and its gradient with respect to (k, b, delta). O(n + J).
double sse_and_grad(const Problem& pb, const LinearParams& p, std::vector<double>* grad) {
    const std::size_t n = pb.t.size();
    const std::size_t nj = pb.s.size();
    const double span = pb.capacity - pb.floor;
    std::vector<double> w;
    if (grad) w.resize(n);
    double sse = 0.0;
    double sum_d = 0.0;
    double sum_sd = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = pb.t[i];
        while (j < nj && pb.s[j] <= ti) {
            sum_d += p.delta[j];
            sum_sd += pb.s[j] * p.delta[j];
            ++j;
        }
        const double z = p.k * ti + p.b + ti * sum_d - sum_sd;
        const double sg = sigmoid(z);
        const double e = pb.floor + span * sg - pb.y[i];
        sse += e * e;
        if (grad) w[i] = 2.0 * e * span * sg * (1.0 - sg);
    }
    if (grad) {
        grad->assign(2 + nj, 0.0);
        double gk = 0.0;
        double gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            gk += w[i] * pb.t[i];
            gb += w[i];
        }
        (*grad)[0] = gk;
        (*grad)[1] = gb;
        // Suffix sums over samples with t_i >= s_j.
        double suf_wt = 0.0;
        double suf_w = 0.0;
        std::size_t i = n;
        for (std::size_t jj = nj; jj-- > 0;) {
            while (i > 0 && pb.t[i - 1] >= pb.s[jj]) {
                --i;
                suf_wt += w[i] * pb.t[i];
                suf_w += w[i];
            }
            (*grad)[2 + jj] = suf_wt - pb.s[jj] * suf_w;
        }
    }
    return sse;
}

double l1(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += std::abs(x);
    return acc;
}

double soft_threshold(double v, double thr) {
    if (v > thr) return v - thr;
    if (v < -thr) return v + thr;
    return 0.0;
}

std::pair<double, double> default_bounds(std::span<const double> y) {
    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double range = hi > lo ? hi - lo : std::max(std::abs(hi), 1.0);
    const double cap = hi > 0.0 ? 1.1 * hi : hi + 0.1 * range;
    const double flo = lo > 0.0 ? 0.0 : lo - 0.1 * range;
    return {cap, flo};
}

std::vector<double> normalized_times(const TimeSeries& s) {
    const auto ts = s.timestamps();
    const double span = ts.size() > 1 ? static_cast<double>(ts.back() - ts.front()) : 1.0;
    std::vector<double> t(ts.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(ts[i] - ts.front()) / span;
    return t;
}

}  // namespace

std::vector<std::size_t> detect_changepoints(const TimeSeries& trend, double alpha, double beta, double cp_range) {
    if (trend.size() < 8) throw InvalidArgument("detect_changepoints: trend too short (need >= 8 samples)");
    if (!(cp_range > 0.0 && cp_range <= 1.0)) throw InvalidArgument("detect_changepoints: cp_range must lie in (0, 1]");
    const auto t = normalized_times(trend);
    const auto fit = polyfit_ols(t, trend.values(), 3);
    const auto rep = studentized_outliers(fit, alpha, beta);
    std::vector<std::size_t> out;
    for (std::size_t i : rep.outlier_indices)
        if (t[i] <= cp_range) out.push_back(i);
    return out;
}

TrendFitReport fit_segsigmoid(const TimeSeries& trend, std::span<const std::size_t> changepoints,
                              const TrendConfig& cfg) {
    if (trend.size() < 3) throw InvalidArgument("fit_segsigmoid: need at least 3 samples");
    if (!(cfg.laplace_scale > 0.0)) throw InvalidArgument("fit_segsigmoid: laplace_scale must be positive");
    const auto t = normalized_times(trend);
    const auto y = trend.values();

    std::vector<std::size_t> idx(changepoints.begin(), changepoints.end());
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<double> s;
    for (std::size_t i : idx) {
        if (i >= t.size()) throw InvalidArgument("fit_segsigmoid: changepoint index out of range");
        if (t[i] > cfg.cp_range + 1e-12) throw InvalidArgument("fit_segsigmoid: changepoint outside cp_range");
        s.push_back(t[i]);
    }

    auto [cap, flo] = default_bounds(y);
    if (cfg.capacity) cap = *cfg.capacity;
    const double ymax = *std::max_element(y.begin(), y.end());
    if (!(cap > ymax)) throw InvalidArgument("fit_segsigmoid: capacity must exceed the training maximum");
    const Problem pb{t, y, s, cap, flo};

    // Initial (k, b) from a line through the logits of the scaled data.
    LinearParams p;
    p.delta.assign(s.size(), 0.0);
    {
        std::vector<double> logit(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double q = std::clamp((y[i] - flo) / (cap - flo), 1e-6, 1.0 - 1e-6);
            logit[i] = std::log(q / (1.0 - q));
        }
        const auto line = polyfit_ols(t, logit, 1);
        // polyfit works in u = (t - shift) / scale.
        p.k = line.coefficients[1] / line.x_scale;
        p.b = line.coefficients[0] - p.k * line.x_shift;
    }

    const double lambda = 1.0 / cfg.laplace_scale;
    const std::size_t dim = 2 + s.size();
    auto pack = [](const LinearParams& q) {
        std::vector<double> v{q.k, q.b};
        v.insert(v.end(), q.delta.begin(), q.delta.end());
        return v;
    };

    std::vector<double> grad;
    double f = sse_and_grad(pb, p, &grad);
    double obj = f + lambda * l1(p.delta);
    double eta = 1.0 / static_cast<double>(std::max<std::size_t>(y.size(), 1));
    std::vector<double> prev_x;
    std::vector<double> prev_g;

    TrendFitReport rep;
    int epoch = 0;
    for (; epoch < cfg.max_epochs; ++epoch) {
        const auto x = pack(p);
        if (!prev_x.empty()) {
            // Barzilai-Borwein guess, then backtrack.
            double ss = 0.0;
            double sy = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double sd = x[d] - prev_x[d];
                ss += sd * sd;
                sy += sd * (grad[d] - prev_g[d]);
            }
            if (sy > 0.0) eta = std::clamp(ss / sy, 1e-12, 1e12);
        }
        LinearParams cand;
        double f_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            cand.k = p.k - eta * grad[0];
            cand.b = p.b - eta * grad[1];
            cand.delta.resize(s.size());
            for (std::size_t j = 0; j < s.size(); ++j)
                cand.delta[j] = soft_threshold(p.delta[j] - eta * grad[2 + j], eta * lambda);
            f_new = sse_and_grad(pb, cand, nullptr);
            const auto xc = pack(cand);
            double lin = 0.0;
            double quad = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double sd = xc[d] - x[d];
                lin += grad[d] * sd;
                quad += sd * sd;
            }
            if (std::isfinite(f_new) && f_new <= f + lin + quad / (2.0 * eta) + 1e-12 * std::abs(f)) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;
        const double obj_new = f_new + lambda * l1(cand.delta);
        prev_x = x;
        prev_g = grad;
        p = std::move(cand);
        f = sse_and_grad(pb, p, &grad);
        const double change = std::abs(obj - obj_new);
        obj = obj_new;
        if (change <= cfg.tol * std::max(std::abs(obj_new), 1e-300)) {
            rep.converged = true;
            ++epoch;
            break;
        }
    }

    SegSigmoidModel& m = rep.model;
    m.capacity = cap;
    m.floor = flo;
    m.rate = p.k;
    m.offset = p.k != 0.0 ? -p.b / p.k : 0.0;
    m.changepoints = s;
    m.deltas = p.delta;
    m.gammas.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) m.gammas[j] = -s[j] * p.delta[j];
    m.laplace_scale = cfg.laplace_scale;
    m.cp_range = cfg.cp_range;
    m.time_origin = trend.timestamps().front();
    m.time_span = trend.size() > 1 ? static_cast<double>(trend.timestamps().back() - trend.timestamps().front()) : 1.0;

    rep.n_changepoints = s.size();
    rep.epochs = epoch;
    rep.final_loss = obj;
    const auto pred = predict_trend(m, trend.timestamps());
    rep.train_rmse = rmse(pred, y);
    try {
        rep.train_mape = mape(pred, y);
    } catch (const ZeroDivisionError&) {
    }
    return rep;
}

TrendFitReport fit_trend(const TimeSeries& trend, const TrendConfig& cfg) {
    const auto cps = detect_changepoints(trend, cfg.alpha, cfg.beta, cfg.cp_range);
    return fit_segsigmoid(trend, cps, cfg);
}

std::vector<double> predict_trend(const SegSigmoidModel& model, std::span<const std::int64_t> horizon_times) {
    std::vector<double> out(horizon_times.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = model.evaluate(model.normalize(horizon_times[i]));
    return out;
}

TrendLoss segsigmoid_loss(const SegSigmoidModel& model, std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw InvalidArgument("segsigmoid_loss: t and y differ in length");
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
    std::vector<double> ts(t.size());
    std::vector<double> ys(t.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        ts[i] = t[order[i]];
        ys[i] = y[order[i]];
    }
    const Problem pb{ts, ys, model.changepoints, model.capacity, model.floor};
    LinearParams p{model.rate, -model.rate * model.offset, model.deltas};

    TrendLoss out;
    std::vector<double> g;
    out.sse = sse_and_grad(pb, p, &g);
    const double lambda = 1.0 / model.laplace_scale;
    out.penalty = lambda * l1(model.deltas);
    // Chain rule from (k, b) to (k, m) with b = -k m.
    out.gradient.resize(g.size());
    out.gradient[0] = g[0] - model.offset * g[1];
    out.gradient[1] = -model.rate * g[1];
    for (std::size_t j = 0; j < model.deltas.size(); ++j) {
        const double d = model.deltas[j];
        out.gradient[2 + j] = g[2 + j] + lambda * static_cast<double>((d > 0.0) - (d < 0.0));
    }
    return out;
}

}  // namespace vsxc
