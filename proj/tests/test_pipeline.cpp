#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "vsxc/error.hpp"
#include "vsxc/pipeline.hpp"
#include "vsxc/serialize.hpp"
#include "vsxc/synthetic.hpp"

using namespace vsxc;

namespace {

PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.synthetic.length = 600;
    cfg.residual.k = 2;
    cfg.residual.epochs = 15;
    cfg.gbt.n_rounds = 60;
    cfg.seed = 3;
    cfg.apply_seed();
    return cfg;
}

std::vector<double> sum3(const ComponentForecast& f) {
    std::vector<double> out(f.trend.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.trend[i] + f.periodic[i] + f.residual[i];
    return out;
}

}  // namespace

TEST_CASE("noise-free synthetic data is cubic plus sinusoid") {
    SyntheticSpec spec;
    spec.length = 300;
    spec.ar_sigma = 0.0;
    spec.noise_sigma = 0.0;
    const auto d = generate_synthetic(spec);
    for (std::size_t i = 0; i < spec.length; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(spec.length - 1);
        const double cubic = spec.cubic[0] + spec.cubic[1] * u + spec.cubic[2] * u * u + spec.cubic[3] * u * u * u;
        const double sine = spec.amplitude * std::sin(2.0 * std::numbers::pi * (static_cast<double>(i) + spec.phase) / spec.period);
        CHECK(d.y[i] == d.trend[i] + d.periodic[i]);
        CHECK(d.trend[i] == doctest::Approx(cubic).epsilon(1e-14));
        CHECK(d.periodic[i] == doctest::Approx(sine).epsilon(1e-12));
    }
    CHECK(d.y.timestamps()[1] - d.y.timestamps()[0] == spec.step);
}

TEST_CASE("synthetic generation is seeded") {
    SyntheticSpec spec;
    spec.seed = 4;
    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    CHECK(a.y == b.y);
    spec.seed = 5;
    CHECK_FALSE(generate_synthetic(spec).y == a.y);
    CHECK(a.y.size() == 2426);
}

TEST_CASE("unit-variance scaling") {
    SyntheticSpec spec;
    spec.unit_variance = true;
    const auto d = generate_synthetic(spec);
    CHECK(oracle::stddev(d.y.values()) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < d.y.size(); i += 97)
        CHECK(d.y[i] == doctest::Approx(d.trend[i] + d.periodic[i] + d.ar[i] + d.noise[i]).epsilon(1e-12));
    spec.length = 100;
    CHECK_THROWS_AS((void)generate_synthetic(spec), InvalidArgument);
}

TEST_CASE("regime-switching AR(1) alternates innovation scales by block") {
    const auto x = regime_ar1(3000, 0.8, 0.2, 2.0, 150, 1);
    REQUIRE(x.size() == 3000);
    double lo = INFINITY, hi = 0.0;
    for (std::size_t b = 0; b < 20; ++b) {
        std::vector<double> innov;
        for (std::size_t i = b * 150 + 1; i < (b + 1) * 150; ++i) innov.push_back(x[i] - 0.8 * x[i - 1]);
        const double sd = oracle::stddev(innov);
        lo = std::min(lo, sd);
        hi = std::max(hi, sd);
    }
    CHECK(lo < 0.3);
    CHECK(hi > 1.5);
    CHECK(regime_ar1(500, 0.8, 0.2, 2.0, 150, 1) == std::vector<double>(x.begin(), x.begin() + 500));
}

TEST_CASE("zero residual model wires trend plus periodic") {
    auto cfg = small_config();
    cfg.residual_model = ResidualModel::zero;
    const auto r = run_pipeline(cfg);
    REQUIRE(r.test_size == 60);
    for (std::size_t i = 0; i < r.test_size; ++i) {
        CHECK(r.forecast.residual[i] == 0.0);
        CHECK(r.forecast.total[i] == r.forecast.trend[i] + r.forecast.periodic[i]);
    }
}

TEST_CASE("full pipeline report invariants") {
    const auto cfg = small_config();
    const auto r = run_pipeline(cfg);
    CHECK(r.train_size == 540);
    CHECK(r.test_size == 60);
    CHECK(r.test_timestamps.size() == 60);
    const auto sum = sum3(r.forecast);
    for (std::size_t i = 0; i < sum.size(); ++i) CHECK(std::abs(r.forecast.total[i] - sum[i]) <= 1e-12);

    // Triangle inequality on the error vectors; the reference components do
    // not sum exactly to the target, so that gap is part of the bound.
    const double gap = oracle::rmse(sum3(r.reference), r.target);
    CHECK(r.total_metrics.rmse <=
          r.trend_metrics.rmse + r.periodic_metrics.rmse + r.residual_metrics.rmse + gap + 1e-12);
    CHECK(r.total_metrics.rmse == doctest::Approx(oracle::rmse(r.forecast.total, r.target)).epsilon(1e-12));
    CHECK(r.trend_metrics.rmse == doctest::Approx(oracle::rmse(r.forecast.trend, r.reference.trend)).epsilon(1e-12));
    CHECK(std::isfinite(r.baseline_metrics.rmse));
    CHECK(r.diagnostics.size() >= 5);
    for (const auto& d : r.diagnostics) {
        CHECK(d.result.p_value >= 0.0);
        CHECK(d.result.p_value <= 1.0);
        CHECK(d.warning == !d.result.reject_at_05);
    }
    CHECK(r.timings.count("decompose") == 1);
}

TEST_CASE("pipeline is deterministic for a fixed seed") {
    const auto cfg = small_config();
    const auto a = run_pipeline(cfg);
    const auto b = run_pipeline(cfg);
    CHECK(a.forecast.total == b.forecast.total);
    CHECK(a.forecast.residual == b.forecast.residual);
    CHECK(a.forecast.periodic == b.forecast.periodic);
}

TEST_CASE("ablation grid and rolling origin") {
    auto cfg = small_config();
    cfg.residual.epochs = 5;
    const auto ab = run_ablation(cfg);
    REQUIRE(ab.cells.size() == 4);
    for (const auto& c : ab.cells) {
        CHECK(std::isfinite(c.total.rmse));
        CHECK(c.total.n == ab.test_size);
    }
    CHECK(dump_json(ab, cfg) == dump_json(run_ablation(cfg), cfg));

    cfg.residual_model = ResidualModel::zero;
    cfg.split_index = 540;
    cfg.test_size = 20;
    const auto folds = rolling_origin(cfg, 3);
    REQUIRE(folds.size() == 3);
    CHECK(folds[0].train_size == 500);
    CHECK(folds[1].train_size == 520);
    CHECK(folds[2].train_size == 540);
    for (const auto& f : folds) CHECK(f.total.n == 20);
}

TEST_CASE("stage failures carry the stage name") {
    auto cfg = small_config();
    cfg.input = "/nonexistent/input.csv";
    try {
        (void)run_pipeline(cfg);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "config");
    }
    cfg = small_config();
    cfg.split_index = 5;
    try {
        (void)run_pipeline(cfg);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "split");
    }
    cfg = small_config();
    cfg.residual.k = 600;
    try {
        (void)run_pipeline(cfg);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "fit-residual");
    }
}

TEST_CASE("CSV input drives the pipeline") {
    SyntheticSpec spec;
    spec.length = 600;
    spec.seed = 3;
    const auto d = generate_synthetic(spec);
    const auto path = std::filesystem::temp_directory_path() / "vsxc_pipeline_input.csv";
    write_csv(path, d.y, "disp");
    auto cfg = small_config();
    cfg.residual_model = ResidualModel::zero;
    const auto from_synth = run_pipeline(cfg);
    cfg.input = path;
    cfg.value_column = "disp";
    const auto from_csv = run_pipeline(cfg);
    CHECK(from_csv.forecast.total == from_synth.forecast.total);
    std::filesystem::remove(path);
}
