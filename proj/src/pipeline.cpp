#include "vsxc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "vsxc/error.hpp"

namespace vsxc {

std::string to_string(PeriodicModel m) { return m == PeriodicModel::gbt ? "gbt" : "persistence"; }

std::string to_string(ResidualModel m) {
    switch (m) {
        case ResidualModel::clusterlstm: return "clusterlstm";
        case ResidualModel::single_lstm: return "single-lstm";
        case ResidualModel::zero: return "zero";
    }
    return "?";
}

PeriodicModel parse_periodic_model(const std::string& s) {
    if (s == "gbt") return PeriodicModel::gbt;
    if (s == "persistence") return PeriodicModel::persistence;
    throw InvalidArgument("unknown periodic model '" + s + "' (expected gbt or persistence)");
}

ResidualModel parse_residual_model(const std::string& s) {
    if (s == "clusterlstm") return ResidualModel::clusterlstm;
    if (s == "single-lstm" || s == "single_lstm" || s == "lstm") return ResidualModel::single_lstm;
    if (s == "zero") return ResidualModel::zero;
    throw InvalidArgument("unknown residual model '" + s + "' (expected clusterlstm, single-lstm or zero)");
}

void PipelineConfig::apply_seed() {
    ga.seed = seed;
    residual.seed = seed;
    synthetic.seed = seed;
}

void PipelineConfig::validate() const {
    if (input && !std::filesystem::exists(*input)) throw IoError("input file not found: " + input->string());
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InvalidArgument("split_ratio must lie in (0, 1)");
    if (lag == 0) throw InvalidArgument("lag must be >= 1");
    if (!(kalman.process_var > 0.0 && kalman.measure_var > 0.0))
        throw InvalidArgument("kalman variances must be positive");
    vmd.validate();
    if (vmd.k_modes != 3) throw InvalidArgument("the pipeline needs a 3-mode decomposition");
    if (!skip_ga) ga.validate();
    gbt.validate();
    residual.validate();
    if (!input) synthetic.validate();
}

namespace {

using Clock = std::chrono::steady_clock;

// Runs fn, records its wall time and tags any failure with the stage name.
template <class Fn>
auto stage(const char* name, std::map<std::string, double>& timings, Fn&& fn) {
    const auto t0 = Clock::now();
    auto record = [&] { timings[name] += std::chrono::duration<double>(Clock::now() - t0).count(); };
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record();
        } else {
            auto out = fn();
            record();
            return out;
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

Diagnostic make_diag(std::string name, TestResult r) {
    Diagnostic d{std::move(name), std::move(r), false, {}};
    if (!d.result.reject_at_05) {
        d.warning = true;
        d.message = d.name + ": cannot reject '" + d.result.null_hypothesis + "' at 0.05 (p = " +
                    std::to_string(d.result.p_value) + ")";
    }
    return d;
}

std::vector<double> slice(std::span<const double> v, std::size_t from, std::size_t count) {
    const auto sub = v.subspan(from, count);
    return {sub.begin(), sub.end()};
}

}  // namespace

TimeSeries load_input(const PipelineConfig& cfg) {
    if (cfg.input) return load_csv(*cfg.input, cfg.value_column);
    return generate_synthetic(cfg.synthetic).y;
}

std::vector<Diagnostic> run_diagnostics(const Decomposition& d, const TimeSeries& y, std::size_t granger_lag) {
    std::vector<Diagnostic> out;
    out.push_back(make_diag("mann_kendall(T)", mann_kendall(d.trend.values())));
    const std::size_t n = y.size();
    const std::size_t lag = std::max<std::size_t>(1, std::min(granger_lag, (n - 2) / 3));
    const std::string suffix = ", lag " + std::to_string(lag) + ")";
    out.push_back(make_diag("granger(y->S" + suffix, granger_test(d.periodic.values(), y.values(), lag).test));
    out.push_back(make_diag("granger(T->S" + suffix, granger_test(d.periodic.values(), d.trend.values(), lag).test));
    out.push_back(make_diag("granger(R->S" + suffix, granger_test(d.periodic.values(), d.residual.values(), lag).test));
    out.push_back(make_diag("ljung_box(R, lag 1)", ljung_box(d.residual.values(), 1)));
    return out;
}

PreparedData prepare(const PipelineConfig& cfg) {
    PreparedData p;
    auto& tm = p.timings;
    stage("config", tm, [&] { cfg.validate(); });
    p.observed = stage("load", tm, [&] { return load_input(cfg); });
    p.filtered = stage("filter", tm, [&] {
        return cfg.skip_kalman ? p.observed : kalman_smooth(p.observed, cfg.kalman);
    });
    p.split = stage("split", tm, [&] {
        auto s = cfg.split_index ? split_at(p.filtered, *cfg.split_index) : split(p.filtered, cfg.split_ratio);
        if (cfg.test_size && *cfg.test_size < s.test.size()) s.test = s.test.slice(0, *cfg.test_size);
        if (s.test.empty()) throw InvalidArgument("the test part is empty");
        const std::size_t need = std::max(cfg.lag, cfg.residual.window) + 16;
        if (s.train.size() < need)
            throw InvalidArgument("training part has " + std::to_string(s.train.size()) + " samples; need >= " +
                                  std::to_string(need));
        return s;
    });
    p.alpha = cfg.vmd.alpha;
    p.tau = cfg.vmd.tau;
    if (!cfg.skip_ga) {
        p.ga = stage("tune", tm, [&] { return ga_optimize(p.split.train, cfg.ga, cfg.vmd); });
        p.alpha = p.ga->best_alpha;
        p.tau = p.ga->best_tau;
    }
    VmdParams vp = cfg.vmd;
    vp.alpha = p.alpha;
    vp.tau = p.tau;
    p.decomposition = stage("decompose", tm, [&] { return vmd_decompose(p.split.train, vp); });
    p.reference = stage("decompose", tm, [&] { return vmd_decompose(p.filtered, vp); });
    p.diagnostics = stage("diagnose", tm, [&] { return run_diagnostics(p.decomposition, p.split.train, cfg.granger_lag); });
    p.trend = stage("fit-trend", tm, [&] { return fit_trend(p.decomposition.trend, cfg.trend); });
    p.trend_forecast = stage("fit-trend", tm, [&] { return predict_trend(p.trend.model, p.split.test.timestamps()); });
    return p;
}

std::vector<double> forecast_residual_component(const PreparedData& p, const PipelineConfig& cfg, ResidualModel model) {
    const std::size_t horizon = p.split.test.size();
    if (model == ResidualModel::zero) return std::vector<double>(horizon, 0.0);
    ClusterLstmConfig rc = cfg.residual;
    if (model == ResidualModel::single_lstm) rc.k = 1;
    const auto r = p.decomposition.residual.values();
    const auto m = clusterlstm_train(make_windows(r, rc.window), rc);
    return clusterlstm_predict(m, r, horizon);
}

std::vector<double> forecast_periodic_component(const PreparedData& p, const PipelineConfig& cfg, PeriodicModel model,
                                                std::span<const double> residual_forecast, std::size_t* rounds) {
    const std::size_t horizon = p.split.test.size();
    const auto& d = p.decomposition;
    if (model == PeriodicModel::persistence) return std::vector<double>(horizon, d.periodic.values().back());
    const auto fit = gbt_fit(build_lag_matrix(d, p.split.train, cfg.lag), cfg.gbt);
    if (rounds) *rounds = fit.model.trees.size();
    return forecast_periodic(fit.model, d.trend.values(), d.periodic.values(), d.residual.values(),
                             p.split.train.values(), p.trend_forecast, residual_forecast, horizon, cfg.lag);
}

ForecastReport assemble_report(const PreparedData& p, std::vector<double> trend, std::vector<double> periodic,
                               std::vector<double> residual) {
    ForecastReport rep;
    rep.train_size = p.split.train.size();
    rep.test_size = p.split.test.size();
    const auto ts = p.split.test.timestamps();
    rep.test_timestamps.assign(ts.begin(), ts.end());
    const std::size_t h = rep.test_size;
    if (trend.size() != h || periodic.size() != h || residual.size() != h)
        throw StageError("predict", "component forecasts do not cover the test horizon");

    rep.forecast.total.resize(h);
    for (std::size_t i = 0; i < h; ++i) rep.forecast.total[i] = trend[i] + periodic[i] + residual[i];
    rep.forecast.trend = std::move(trend);
    rep.forecast.periodic = std::move(periodic);
    rep.forecast.residual = std::move(residual);

    const std::size_t from = rep.train_size;
    rep.reference.trend = slice(p.reference.trend.values(), from, h);
    rep.reference.periodic = slice(p.reference.periodic.values(), from, h);
    rep.reference.residual = slice(p.reference.residual.values(), from, h);
    rep.reference.total.resize(h);
    for (std::size_t i = 0; i < h; ++i)
        rep.reference.total[i] = rep.reference.trend[i] + rep.reference.periodic[i] + rep.reference.residual[i];
    const auto target = p.split.test.values();
    rep.target.assign(target.begin(), target.end());

    rep.trend_metrics = evaluate(rep.forecast.trend, rep.reference.trend);
    rep.periodic_metrics = evaluate(rep.forecast.periodic, rep.reference.periodic);
    rep.residual_metrics = evaluate(rep.forecast.residual, rep.reference.residual);
    rep.total_metrics = evaluate(rep.forecast.total, rep.target);
    const std::vector<double> baseline(h, p.split.train.values().back());
    rep.baseline_metrics = evaluate(baseline, rep.target);

    rep.alpha = p.alpha;
    rep.tau = p.tau;
    rep.ga = p.ga;
    rep.center_freqs = p.decomposition.center_freqs;
    rep.recon_mse = p.decomposition.recon_mse;
    rep.vmd_iterations = p.decomposition.iterations;
    rep.n_changepoints = p.trend.n_changepoints;
    rep.diagnostics = p.diagnostics;
    rep.timings = p.timings;
    for (const auto& d : p.diagnostics)
        if (d.warning) rep.warnings.push_back(d.message);
    if (p.decomposition.hit_max_iter) rep.warnings.push_back("decompose: VMD stopped at max_iter before converging");
    if (!p.trend.converged) rep.warnings.push_back("fit-trend: optimizer stopped at max_epochs before converging");
    return rep;
}

ForecastReport run_pipeline(const PipelineConfig& cfg) {
    auto p = prepare(cfg);
    auto& tm = p.timings;
    auto residual = stage("fit-residual", tm, [&] { return forecast_residual_component(p, cfg, cfg.residual_model); });
    std::size_t rounds = 0;
    auto periodic = stage("fit-periodic", tm, [&] {
        return forecast_periodic_component(p, cfg, cfg.periodic_model, residual, &rounds);
    });
    auto rep = stage("evaluate", tm, [&] {
        return assemble_report(p, p.trend_forecast, std::move(periodic), std::move(residual));
    });
    rep.gbt_rounds = rounds;
    return rep;
}

AblationReport run_ablation(const PipelineConfig& cfg) {
    auto p = prepare(cfg);
    auto& tm = p.timings;
    AblationReport out;
    for (ResidualModel rm : {ResidualModel::clusterlstm, ResidualModel::single_lstm}) {
        const auto residual = stage("fit-residual", tm, [&] { return forecast_residual_component(p, cfg, rm); });
        for (PeriodicModel pm : {PeriodicModel::gbt, PeriodicModel::persistence}) {
            auto periodic = stage("fit-periodic", tm, [&] { return forecast_periodic_component(p, cfg, pm, residual); });
            const auto rep = assemble_report(p, p.trend_forecast, std::move(periodic), residual);
            out.cells.push_back({pm, rm, rep.total_metrics, rep.periodic_metrics, rep.residual_metrics});
            out.trend_metrics = rep.trend_metrics;
            out.baseline_metrics = rep.baseline_metrics;
            out.train_size = rep.train_size;
            out.test_size = rep.test_size;
        }
    }
    std::stable_sort(out.cells.begin(), out.cells.end(), [](const AblationCell& a, const AblationCell& b) {
        return static_cast<int>(a.periodic) < static_cast<int>(b.periodic);
    });
    return out;
}

std::vector<RollingFold> rolling_origin(const PipelineConfig& cfg, std::size_t folds) {
    if (folds == 0) throw InvalidArgument("rolling_origin: folds must be >= 1");
    std::size_t n = 0;
    try {
        n = load_input(cfg).size();
    } catch (const std::exception& e) {
        throw StageError("load", e.what());
    }
    const std::size_t end_train =
        cfg.split_index ? *cfg.split_index : static_cast<std::size_t>(std::floor(cfg.split_ratio * static_cast<double>(n)));
    if (end_train >= n) throw InvalidArgument("rolling_origin: the split leaves no test samples");
    const std::size_t h = cfg.test_size ? std::min(*cfg.test_size, n - end_train) : n - end_train;
    if ((folds - 1) * h >= end_train) throw InvalidArgument("rolling_origin: too many folds for the series");
    std::vector<RollingFold> out;
    for (std::size_t f = 0; f < folds; ++f) {
        PipelineConfig c = cfg;
        c.split_index = end_train - (folds - 1 - f) * h;
        c.test_size = h;
        const auto rep = run_pipeline(c);
        out.push_back({*c.split_index, rep.total_metrics, rep.baseline_metrics});
    }
    return out;
}

}  // namespace vsxc
