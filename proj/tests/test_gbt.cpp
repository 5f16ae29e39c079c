#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vsxc/error.hpp"
#include "vsxc/gbt.hpp"
#include "vsxc/serialize.hpp"

using namespace vsxc;

namespace {

GbtConfig no_early_stop() {
    GbtConfig cfg;
    cfg.early_stopping_rounds = 0;
    return cfg;
}

std::vector<double> ramp(std::size_t n, double offset) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = offset + static_cast<double>(i);
    return v;
}

void audit_tree(const RegressionTree& tree, const GbtModel& m) {
    for (const auto& node : tree.nodes) {
        CHECK(std::isfinite(node.weight));
        if (node.is_leaf()) {
            CHECK(node.weight == -node.grad_sum / (node.hess_sum + m.lambda));
            continue;
        }
        CHECK(node.feature < static_cast<int>(m.n_features));
        const double g = split_gain(node.left_grad, node.left_hess, node.right_grad, node.right_hess, node.grad_sum,
                                    node.hess_sum, m.lambda, m.gamma);
        CHECK(g == node.gain);
        const double formula =
            0.5 * (node.left_grad * node.left_grad / (node.left_hess + m.lambda) +
                   node.right_grad * node.right_grad / (node.right_hess + m.lambda) -
                   node.grad_sum * node.grad_sum / (node.hess_sum + m.lambda)) -
            m.gamma;
        CHECK(node.gain == doctest::Approx(formula).epsilon(1e-12));
        // The stored gain is net of gamma: positive means the structure score beat gamma.
        CHECK(node.gain > 0.0);
        CHECK(node.left_hess + node.right_hess == node.hess_sum);
        const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
        const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
        CHECK(l.hess_sum == node.left_hess);
        CHECK(r.hess_sum == node.right_hess);
    }
}

}  // namespace

TEST_CASE("lag matrix shape and layout") {
    const auto t = ramp(50, 0.0), s = ramp(50, 1000.0), r = ramp(50, 2000.0), y = ramp(50, 3000.0);
    const auto m = build_lag_matrix(t, s, r, y, 48);
    CHECK(m.rows() == 2);
    CHECK(m.n_features == 192);
    // Column j * lag + (i - 1) holds component j at t - i.
    for (std::size_t row = 0; row < m.rows(); ++row) {
        const std::size_t time = row + 48;
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t i = 1; i <= 48; ++i)
                CHECK(m.row(row)[j * 48 + (i - 1)] == 1000.0 * static_cast<double>(j) + static_cast<double>(time - i));
        CHECK(m.targets[row] == s[time]);
    }
    CHECK(m.row(0)[47] == t[0]);
    CHECK(m.row(0)[0] == t[47]);
}

TEST_CASE("lag matrix of constant series") {
    const std::vector<double> c(60, 2.5);
    const auto m = build_lag_matrix(c, c, c, c, 48);
    CHECK(m.rows() == 12);
    for (double v : m.features) CHECK(v == 2.5);
    for (double v : m.targets) CHECK(!std::isnan(v));
}

TEST_CASE("lag matrix errors") {
    const std::vector<double> a(10, 1.0), b(9, 1.0);
    CHECK_THROWS_AS((void)build_lag_matrix(a, a, a, b, 3), InvalidArgument);
    CHECK_THROWS_AS((void)build_lag_matrix(a, a, a, a, 10), InvalidArgument);
    CHECK_THROWS_AS((void)build_lag_matrix(a, a, a, a, 0), InvalidArgument);
}

TEST_CASE("a single stump on a step function") {
    const std::vector<double> x{-2.0, -1.0, 1.0, 2.0};
    const std::vector<double> y{0.0, 0.0, 1.0, 1.0};
    GbtConfig cfg = no_early_stop();
    cfg.max_depth = 1;
    cfg.n_rounds = 1;
    cfg.learning_rate = 1.0;
    cfg.lambda = 0.0;
    cfg.gamma = 0.0;
    const auto fit = gbt_fit(x, 1, y, cfg);
    REQUIRE(fit.model.trees.size() == 1);
    const auto& root = fit.model.trees[0].nodes[0];
    CHECK(root.feature == 0);
    CHECK(root.threshold == 0.0);
    // Hand calculation: base 0.5, g = +-0.5, G_L = 1, G_R = -1, H_L = H_R = 2.
    CHECK(root.gain == doctest::Approx(0.5 * (1.0 / 2.0 + 1.0 / 2.0 - 0.0)));
    for (std::size_t i = 0; i < 4; ++i) CHECK(gbt_predict(fit.model, std::span(&x[i], 1)) == doctest::Approx(y[i]));
}

TEST_CASE("zero rounds predict the base score") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    const std::vector<double> y{3, 1, 4, 1, 5, 9};
    GbtConfig cfg = no_early_stop();
    cfg.n_rounds = 0;
    const auto fit = gbt_fit(x, 2, std::span(y).first(3), cfg);
    CHECK(fit.model.trees.empty());
    const std::vector<double> probe{100.0, -100.0};
    CHECK(gbt_predict(fit.model, probe) == doctest::Approx(8.0 / 3.0));
    for (double p : fit.train_predictions) CHECK(p == fit.model.base_score);
}

TEST_CASE("memorizes random rows") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 200, nf = 5;
    std::vector<double> x(n * nf), y(n);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    GbtConfig cfg = no_early_stop();
    cfg.max_depth = 6;
    cfg.n_rounds = 400;
    cfg.learning_rate = 0.3;
    const auto fit = gbt_fit(x, nf, y, cfg);
    std::vector<double> pred(n);
    for (std::size_t i = 0; i < n; ++i) pred[i] = gbt_predict(fit.model, std::span(x).subspan(i * nf, nf));
    CHECK(oracle::rmse(pred, y) < 1e-3);
    for (std::size_t i = 0; i < n; ++i) CHECK(pred[i] == doctest::Approx(fit.train_predictions[i]).epsilon(1e-12));
    for (std::size_t r = 1; r < fit.loss_history.size(); ++r)
        CHECK(fit.loss_history[r] <= fit.loss_history[r - 1]);
    for (const auto& tree : fit.model.trees) audit_tree(tree, fit.model);
}

TEST_CASE("split gains are auditable and respect gamma") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> d;
    const std::size_t n = 300, nf = 4;
    std::vector<double> x(n * nf), y(n);
    for (auto& v : x) v = d(rng);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(x[i * nf]) + 0.5 * x[i * nf + 1] + 0.1 * d(rng);
    for (double gamma : {0.0, 0.5, 3.0}) {
        GbtConfig cfg = no_early_stop();
        cfg.n_rounds = 20;
        cfg.gamma = gamma;
        cfg.lambda = 2.0;
        const auto fit = gbt_fit(x, nf, y, cfg);
        for (const auto& tree : fit.model.trees) audit_tree(tree, fit.model);
    }
}

TEST_CASE("refits are bit-identical and ties go to the lowest feature") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    const std::size_t n = 150, nf = 3;
    std::vector<double> x(n * nf), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = d(rng);
        // Columns 1 and 2 are identical, so every split on them ties.
        x[i * nf] = d(rng);
        x[i * nf + 1] = v;
        x[i * nf + 2] = v;
        y[i] = v > 0.0 ? 1.0 : -1.0;
    }
    GbtConfig cfg;
    cfg.n_rounds = 30;
    const auto a = gbt_fit(x, nf, y, cfg);
    cfg.threads = 1;
    const auto b = gbt_fit(x, nf, y, cfg);
    CHECK(dump_json(a.model) == dump_json(b.model));
    CHECK(a.train_predictions == b.train_predictions);
    for (const auto& tree : a.model.trees)
        for (int f : tree.used_features()) CHECK(f != 2);
}

TEST_CASE("unused features do not affect predictions") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> d;
    const std::size_t n = 120, nf = 6;
    std::vector<double> x(n * nf), y(n);
    for (auto& v : x) v = d(rng);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i * nf + 2] > 0.3 ? 2.0 : 0.0;
    GbtConfig cfg = no_early_stop();
    cfg.n_rounds = 10;
    cfg.max_depth = 2;
    const auto fit = gbt_fit(x, nf, y, cfg);
    std::vector<bool> used(nf, false);
    for (const auto& tree : fit.model.trees)
        for (int f : tree.used_features()) used[static_cast<std::size_t>(f)] = true;
    for (std::size_t i = 0; i < 20; ++i) {
        std::vector<double> row(x.begin() + static_cast<std::ptrdiff_t>(i * nf),
                                x.begin() + static_cast<std::ptrdiff_t>((i + 1) * nf));
        const double base = gbt_predict(fit.model, row);
        for (std::size_t f = 0; f < nf; ++f)
            if (!used[f]) row[f] += 1e3 * d(rng);
        CHECK(gbt_predict(fit.model, row) == base);
    }
    CHECK_THROWS_AS((void)gbt_predict(fit.model, std::vector<double>(nf + 1, 0.0)), InvalidArgument);
}

TEST_CASE("early stopping keeps the best validation round") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> d;
    const std::size_t n = 200;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = d(rng);
        y[i] = d(rng);  // pure noise, so validation loss bottoms out early
    }
    GbtConfig cfg;
    cfg.n_rounds = 300;
    cfg.early_stopping_rounds = 10;
    const auto fit = gbt_fit(x, 1, y, cfg);
    CHECK(fit.train_rows == 180);
    CHECK(fit.model.trees.size() < 300);
    const auto& vh = fit.validation_history;
    const double best = *std::min_element(vh.begin(), vh.end());
    CHECK(vh[fit.model.trees.size()] == best);
}

TEST_CASE("recursive periodic forecast") {
    const std::size_t lag = 48, n = 600, horizon = 100;
    std::vector<double> t(n + horizon), s(n + horizon), r(n + horizon, 0.0), y(n + horizon);
    for (std::size_t i = 0; i < n + horizon; ++i) {
        t[i] = 1.0 + 0.001 * static_cast<double>(i);
        s[i] = std::sin(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / 24.0);
        y[i] = t[i] + s[i] + r[i];
    }
    const auto hist = [&](const std::vector<double>& v) { return std::span(v).first(n); };
    const auto fut = [&](const std::vector<double>& v) { return std::span(v).subspan(n, horizon); };
    const auto m = build_lag_matrix(hist(t), hist(s), hist(r), hist(y), lag);
    const auto fit = gbt_fit(m, {});

    CHECK(forecast_periodic(fit.model, hist(t), hist(s), hist(r), hist(y), fut(t), fut(r), 0, lag).empty());

    const auto one = forecast_periodic(fit.model, hist(t), hist(s), hist(r), hist(y), fut(t), fut(r), 1, lag);
    REQUIRE(one.size() == 1);
    const auto feats = lag_features(hist(t), hist(s), hist(r), hist(y), n, lag);
    CHECK(one[0] == gbt_predict(fit.model, feats));

    const auto pred = forecast_periodic(fit.model, hist(t), hist(s), hist(r), hist(y), fut(t), fut(r), horizon, lag);
    REQUIRE(pred.size() == horizon);
    CHECK(oracle::rmse(pred, fut(s)) < 0.05 * 1.0);

    CHECK_THROWS_AS((void)forecast_periodic(fit.model, std::span(t).first(10), std::span(s).first(10),
                                            std::span(r).first(10), std::span(y).first(10), fut(t), fut(r), 5, lag),
                    InvalidArgument);
}
