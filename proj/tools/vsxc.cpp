#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vsxc/error.hpp"
#include "vsxc/pipeline.hpp"
#include "vsxc/serialize.hpp"

namespace {

using namespace vsxc;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes to `path`, or stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text << '\n';
}

TimeSeries read_series(const std::string& path, const std::string& column) {
    return load_csv(path, column);
}

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

PipelineConfig load_config(const Globals& g) {
    PipelineConfig cfg;
    if (!g.config_path.empty()) cfg = config_from_json(read_file(g.config_path));
    if (g.seed) cfg.seed = *g.seed;
    cfg.apply_seed();
    return cfg;
}

// Input path/column shared by most subcommands.
struct InputOpts {
    std::string input;
    std::string column = "value";

    void add(CLI::App* app, bool required) {
        auto* o = app->add_option("--input,-i", input, "input CSV (header row, optional timestamp column)");
        if (required) o->required();
        app->add_option("--column", column, "value column name")->capture_default_str();
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vsxc: decomposition-based time-series forecasting toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "pipeline configuration (JSON)");
    app.add_option("--seed", g.seed, "seed for every stochastic stage");

    std::string current = "cli";
    std::function<void()> action;

    // filter
    auto* filter = app.add_subcommand("filter", "scalar Kalman filter");
    InputOpts f_in;
    f_in.add(filter, true);
    std::string f_out;
    std::optional<double> f_q, f_r;
    filter->add_option("--output,-o", f_out, "output CSV")->required();
    filter->add_option("--q", f_q, "process noise variance");
    filter->add_option("--r", f_r, "measurement noise variance");
    filter->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            if (f_q) cfg.kalman.process_var = *f_q;
            if (f_r) cfg.kalman.measure_var = *f_r;
            write_csv(f_out, kalman_smooth(read_series(f_in.input, f_in.column), cfg.kalman), f_in.column);
        };
    });

    // decompose
    auto* decompose = app.add_subcommand("decompose", "variational mode decomposition into T, S, R");
    InputOpts d_in;
    d_in.add(decompose, true);
    std::optional<double> d_alpha, d_tau, d_tol;
    std::optional<int> d_k, d_iter;
    std::string d_prefix = "decomp";
    decompose->add_option("--alpha", d_alpha, "bandwidth penalty");
    decompose->add_option("--tau", d_tau, "dual ascent step");
    decompose->add_option("--k", d_k, "number of modes");
    decompose->add_option("--tol", d_tol, "convergence tolerance");
    decompose->add_option("--max-iter", d_iter, "iteration cap");
    decompose->add_option("--out-prefix", d_prefix, "output prefix")->capture_default_str();
    decompose->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            auto p = cfg.vmd;
            if (d_alpha) p.alpha = *d_alpha;
            if (d_tau) p.tau = *d_tau;
            if (d_k) p.k_modes = *d_k;
            if (d_tol) p.tol = *d_tol;
            if (d_iter) p.max_iter = *d_iter;
            const auto y = read_series(d_in.input, d_in.column);
            if (p.k_modes == 3) {
                const auto d = vmd_decompose(y, p);
                write_csv(d_prefix + "_T.csv", d.trend);
                write_csv(d_prefix + "_S.csv", d.periodic);
                write_csv(d_prefix + "_R.csv", d.residual);
                emit(d_prefix + "_summary.json", vmd_summary_json(d, p.alpha, p.tau));
            } else {
                const auto r = vmd(y.values(), p);
                for (std::size_t k = 0; k < r.modes.size(); ++k)
                    write_csv(d_prefix + "_mode" + std::to_string(k) + ".csv", y.with_values(r.modes[k]));
                Decomposition d;
                d.recon_mse = r.recon_mse;
                d.iterations = r.iterations;
                d.hit_max_iter = r.hit_max_iter;
                emit(d_prefix + "_summary.json", vmd_summary_json(d, p.alpha, p.tau));
            }
        };
    });

    // tune
    auto* tune = app.add_subcommand("tune", "genetic search over (alpha, tau)");
    InputOpts t_in;
    t_in.add(tune, true);
    std::optional<int> t_pop, t_gens;
    std::optional<double> t_amin, t_amax, t_tmin, t_tmax;
    std::string t_out;
    tune->add_option("--pop", t_pop, "population size");
    tune->add_option("--gens", t_gens, "generations");
    tune->add_option("--alpha-min", t_amin);
    tune->add_option("--alpha-max", t_amax);
    tune->add_option("--tau-min", t_tmin);
    tune->add_option("--tau-max", t_tmax);
    tune->add_option("--output,-o", t_out, "output JSON (stdout when omitted)");
    tune->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            auto& ga = cfg.ga;
            if (t_pop) ga.pop_size = *t_pop;
            if (t_gens) ga.generations = *t_gens;
            if (t_amin) ga.alpha_bounds.first = *t_amin;
            if (t_amax) ga.alpha_bounds.second = *t_amax;
            if (t_tmin) ga.tau_bounds.first = *t_tmin;
            if (t_tmax) ga.tau_bounds.second = *t_tmax;
            emit(t_out, dump_json(ga_optimize(read_series(t_in.input, t_in.column), ga, cfg.vmd)));
        };
    });

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "trend, causality and white-noise tests on the decomposition");
    InputOpts g_in;
    g_in.add(diagnose, true);
    std::string g_out;
    std::size_t g_acf = 48;
    diagnose->add_option("--output,-o", g_out, "output JSON (stdout when omitted)");
    diagnose->add_option("--acf-lags", g_acf, "ACF lags reported for S")->capture_default_str();
    diagnose->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            const auto y = read_series(g_in.input, g_in.column);
            const auto d = vmd_decompose(y, cfg.vmd);
            const auto diags = run_diagnostics(d, y, cfg.granger_lag);
            const auto rho = acf(d.periodic.values(), std::min(g_acf, y.size() - 1));
            std::ostringstream out;
            out << "{\n\"tests\": " << dump_json(diags) << ",\n\"acf_S\": [";
            for (std::size_t k = 0; k < rho.size(); ++k) out << (k ? ", " : "") << rho[k];
            out << "]\n}";
            emit(g_out, out.str());
            for (const auto& x : diags)
                if (x.warning) std::cerr << "warning: " << x.message << '\n';
        };
    });

    // fit-trend
    auto* fit_trend_cmd = app.add_subcommand("fit-trend", "piecewise-logistic trend fit");
    InputOpts ft_in;
    ft_in.add(fit_trend_cmd, true);
    std::optional<double> ft_cap, ft_alpha, ft_beta, ft_range, ft_scale;
    std::string ft_out, ft_forecast;
    std::size_t ft_h = 0;
    fit_trend_cmd->add_option("--capacity", ft_cap, "fixed capacity (default 1.1 x max)");
    fit_trend_cmd->add_option("--alpha", ft_alpha, "Bonferroni significance level");
    fit_trend_cmd->add_option("--beta", ft_beta, "critical value scaling");
    fit_trend_cmd->add_option("--cp-range", ft_range, "changepoint range fraction");
    fit_trend_cmd->add_option("--laplace-scale", ft_scale, "Laplace prior scale on deltas");
    fit_trend_cmd->add_option("--output,-o", ft_out, "report/model JSON (stdout when omitted)");
    fit_trend_cmd->add_option("--horizon", ft_h, "forecast steps after the input");
    fit_trend_cmd->add_option("--forecast", ft_forecast, "forecast CSV");
    fit_trend_cmd->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            auto& t = cfg.trend;
            if (ft_cap) t.capacity = *ft_cap;
            if (ft_alpha) t.alpha = *ft_alpha;
            if (ft_beta) t.beta = *ft_beta;
            if (ft_range) t.cp_range = *ft_range;
            if (ft_scale) t.laplace_scale = *ft_scale;
            const auto y = read_series(ft_in.input, ft_in.column);
            const auto rep = fit_trend(y, t);
            emit(ft_out, dump_json(rep));
            if (ft_h > 0 && !ft_forecast.empty()) {
                std::vector<std::int64_t> ts(ft_h);
                for (std::size_t i = 0; i < ft_h; ++i)
                    ts[i] = y.timestamps().back() + static_cast<std::int64_t>(i + 1) * y.step();
                const auto f = predict_trend(rep.model, ts);
                write_csv(ft_forecast, TimeSeries(ts, f));
            }
        };
    });

    // fit-periodic
    auto* fit_periodic = app.add_subcommand("fit-periodic", "gradient-boosted trees on lagged components");
    InputOpts fp_in;
    fp_in.add(fit_periodic, true);
    std::string fp_prefix, fp_out;
    std::optional<std::size_t> fp_lag;
    std::optional<int> fp_depth, fp_rounds, fp_es;
    std::optional<double> fp_eta, fp_lambda, fp_gamma;
    fit_periodic->add_option("--components", fp_prefix, "prefix of <prefix>_T/_S/_R.csv from decompose")->required();
    fit_periodic->add_option("--lag", fp_lag, "lag window per component");
    fit_periodic->add_option("--max-depth", fp_depth);
    fit_periodic->add_option("--eta", fp_eta, "learning rate");
    fit_periodic->add_option("--rounds", fp_rounds);
    fit_periodic->add_option("--lambda", fp_lambda);
    fit_periodic->add_option("--gamma", fp_gamma);
    fit_periodic->add_option("--early-stopping", fp_es, "stagnant rounds before stopping (0 disables)");
    fit_periodic->add_option("--output,-o", fp_out, "model JSON (stdout when omitted)");
    fit_periodic->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            auto& b = cfg.gbt;
            if (fp_lag) cfg.lag = *fp_lag;
            if (fp_depth) b.max_depth = *fp_depth;
            if (fp_eta) b.learning_rate = *fp_eta;
            if (fp_rounds) b.n_rounds = *fp_rounds;
            if (fp_lambda) b.lambda = *fp_lambda;
            if (fp_gamma) b.gamma = *fp_gamma;
            if (fp_es) b.early_stopping_rounds = *fp_es;
            const auto y = read_series(fp_in.input, fp_in.column);
            const auto T = read_series(fp_prefix + "_T.csv", "value");
            const auto S = read_series(fp_prefix + "_S.csv", "value");
            const auto R = read_series(fp_prefix + "_R.csv", "value");
            const auto fit = gbt_fit(build_lag_matrix(T.values(), S.values(), R.values(), y.values(), cfg.lag), b);
            emit(fp_out, dump_json(fit.model));
        };
    });

    // fit-residual
    auto* fit_residual = app.add_subcommand("fit-residual", "clustered LSTM residual model");
    InputOpts fr_in;
    fr_in.add(fit_residual, true);
    std::optional<std::size_t> fr_k, fr_window, fr_hidden;
    std::optional<int> fr_epochs;
    std::optional<double> fr_lr;
    bool fr_force = false;
    std::string fr_out;
    fit_residual->add_option("--k", fr_k, "clusters (1 = single LSTM)");
    fit_residual->add_option("--window", fr_window, "window length");
    fit_residual->add_option("--hidden", fr_hidden, "hidden units per layer");
    fit_residual->add_option("--epochs", fr_epochs);
    fit_residual->add_option("--lr", fr_lr, "Adam learning rate");
    fit_residual->add_flag("--force", fr_force, "train even if the residual looks like white noise");
    fit_residual->add_option("--output,-o", fr_out, "model JSON (stdout when omitted)");
    fit_residual->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            auto& r = cfg.residual;
            if (fr_k) r.k = *fr_k;
            if (fr_window) r.window = *fr_window;
            if (fr_hidden) r.hidden = *fr_hidden;
            if (fr_epochs) r.epochs = *fr_epochs;
            if (fr_lr) r.learning_rate = *fr_lr;
            if (fr_force) r.force = true;
            const auto y = read_series(fr_in.input, fr_in.column);
            emit(fr_out, dump_json(clusterlstm_train(make_windows(y, r.window), r)));
        };
    });

    // predict
    auto* predict = app.add_subcommand("predict", "run the full pipeline and forecast the test span");
    InputOpts p_in;
    p_in.add(predict, false);
    std::string p_csv, p_report, p_pm, p_rm;
    std::optional<std::size_t> p_split_index;
    std::optional<double> p_split_ratio;
    bool p_tune = false, p_skip_kalman = false, p_force = false;
    predict->add_option("--output,-o", p_csv, "predictions CSV");
    predict->add_option("--report", p_report, "report JSON (stdout when omitted)");
    predict->add_option("--periodic-model", p_pm, "gbt | persistence");
    predict->add_option("--residual-model", p_rm, "clusterlstm | single-lstm | zero");
    predict->add_option("--split-index", p_split_index, "explicit training length");
    predict->add_option("--split-ratio", p_split_ratio, "training fraction (floor)");
    predict->add_flag("--tune", p_tune, "run the genetic search before decomposing");
    predict->add_flag("--skip-kalman", p_skip_kalman, "model the raw series");
    predict->add_flag("--force", p_force, "train the residual model even on white noise");

    auto apply_run_opts = [&](PipelineConfig& cfg, const InputOpts& in) {
        if (!in.input.empty()) {
            cfg.input = in.input;
            cfg.value_column = in.column;
        }
        if (!p_pm.empty()) cfg.periodic_model = parse_periodic_model(p_pm);
        if (!p_rm.empty()) cfg.residual_model = parse_residual_model(p_rm);
        if (p_split_index) cfg.split_index = *p_split_index;
        if (p_split_ratio) cfg.split_ratio = *p_split_ratio;
        if (p_tune) cfg.skip_ga = false;
        if (p_skip_kalman) cfg.skip_kalman = true;
        if (p_force) cfg.residual.force = true;
    };

    predict->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            apply_run_opts(cfg, p_in);
            const auto rep = run_pipeline(cfg);
            if (!p_csv.empty()) {
                write_csv(p_csv, rep.test_timestamps,
                          {"trend", "periodic", "residual", "total", "target"},
                          {rep.forecast.trend, rep.forecast.periodic, rep.forecast.residual, rep.forecast.total,
                           rep.target});
            }
            emit(p_report, dump_json(rep, cfg));
            for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
        };
    });

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions, or run rolling-origin evaluation");
    std::string e_pred, e_target, e_pcol = "total", e_tcol = "value", e_out;
    std::size_t e_folds = 0;
    InputOpts e_in;
    e_in.add(evaluate_cmd, false);
    evaluate_cmd->add_option("--pred", e_pred, "predictions CSV");
    evaluate_cmd->add_option("--target", e_target, "target CSV");
    evaluate_cmd->add_option("--pred-column", e_pcol)->capture_default_str();
    evaluate_cmd->add_option("--target-column", e_tcol)->capture_default_str();
    evaluate_cmd->add_option("--rolling-origin", e_folds, "number of rolling-origin folds");
    evaluate_cmd->add_option("--output,-o", e_out, "metrics JSON (stdout when omitted)");
    evaluate_cmd->callback([&] {
        action = [&] {
            if (e_folds > 0) {
                auto cfg = load_config(g);
                apply_run_opts(cfg, e_in);
                emit(e_out, dump_json(rolling_origin(cfg, e_folds)));
                return;
            }
            if (e_pred.empty() || e_target.empty())
                throw InvalidArgument("evaluate needs --pred and --target (or --rolling-origin N)");
            const auto p = read_series(e_pred, e_pcol);
            const auto t = read_series(e_target, e_tcol);
            if (p.size() != t.size())
                throw InvalidArgument("prediction and target lengths differ (" + std::to_string(p.size()) + " vs " +
                                      std::to_string(t.size()) + ")");
            emit(e_out, dump_json(evaluate(p.values(), t.values())));
        };
    });

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic series with known components");
    std::string s_out;
    std::optional<std::size_t> s_len;
    bool s_unit = false, s_regime = false;
    synth->add_option("--output,-o", s_out, "output CSV")->required();
    synth->add_option("--length", s_len);
    synth->add_flag("--unit-variance", s_unit, "scale to unit variance");
    synth->add_flag("--regime-switching", s_regime, "switch the AR innovation scale in blocks");
    synth->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            auto spec = cfg.synthetic;
            if (s_len) spec.length = *s_len;
            if (s_unit) spec.unit_variance = true;
            if (s_regime) spec.regime_switching = true;
            const auto d = generate_synthetic(spec);
            write_csv(s_out, d.y.timestamps(), {"value", "trend", "periodic", "ar", "noise"},
                      {d.y.values(), d.trend, d.periodic, d.ar, d.noise});
        };
    });

    // ablate
    auto* ablate = app.add_subcommand("ablate", "{gbt, persistence} x {clusterlstm, single-lstm} comparison");
    InputOpts a_in;
    a_in.add(ablate, false);
    std::string a_out;
    ablate->add_option("--output,-o", a_out, "report JSON (stdout when omitted)");
    ablate->callback([&] {
        action = [&] {
            auto cfg = load_config(g);
            if (!a_in.input.empty()) {
                cfg.input = a_in.input;
                cfg.value_column = a_in.column;
            }
            emit(a_out, dump_json(run_ablation(cfg), cfg));
        };
    });

    for (auto* sub : app.get_subcommands({})) {
        auto* s = sub;
        s->preparse_callback([&current, s](std::size_t) { current = s->get_name(); });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        if (action) action();
    } catch (const StageError& e) {
        std::cerr << "vsxc " << current << ": stage '" << e.stage() << "' failed: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "vsxc " << current << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
