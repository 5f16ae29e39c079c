#include "vsxc/serialize.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "vsxc/error.hpp"

namespace vsxc {

using Json = nlohmann::ordered_json;

namespace {

Json parse(const std::string& text, const char* what) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string(what) + ": invalid JSON: " + e.what());
    }
}

// Non-finite doubles become null so the output stays valid JSON.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json opt(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

Json metrics(const MetricsReport& m) { return Json{{"rmse", num(m.rmse)}, {"mape", opt(m.mape)}, {"n", m.n}}; }

Json test_result(const TestResult& r) {
    return Json{{"statistic", num(r.statistic)},
                {"p_value", num(r.p_value)},
                {"reject_at_05", r.reject_at_05},
                {"null_hypothesis", r.null_hypothesis},
                {"conclusion", r.reject_at_05 ? "reject" : "fail to reject"}};
}

// Reads fields out of a JSON object and complains about keys nobody asked for.
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw InvalidArgument("config: '" + path_ + "' must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        used_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).template get<T>();
        } catch (const Json::exception& e) {
            throw InvalidArgument("config: bad value for '" + path_ + key + "': " + e.what());
        }
    }

    template <class T>
    void get_optional(const char* key, std::optional<T>& out) {
        used_.insert(key);
        if (!j_.contains(key)) return;
        if (j_.at(key).is_null()) {
            out.reset();
            return;
        }
        T v{};
        get(key, v);
        out = v;
    }

    [[nodiscard]] bool has(const char* key) const { return j_.contains(key); }
    Reader child(const char* key) {
        used_.insert(key);
        return Reader(j_.at(key), path_ + key + ".");
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!used_.count(k)) throw InvalidArgument("config: unknown key '" + path_ + k + "'");
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

Json model_json(const SegSigmoidModel& m) {
    return Json{{"time_convention",
                 "t = (epoch_seconds - time_origin) / time_span; changepoints are in this normalised time"},
                {"capacity", m.capacity},
                {"floor", m.floor},
                {"rate", m.rate},
                {"offset", m.offset},
                {"changepoints", m.changepoints},
                {"deltas", m.deltas},
                {"gammas", m.gammas},
                {"laplace_scale", m.laplace_scale},
                {"cp_range", m.cp_range},
                {"time_origin", m.time_origin},
                {"time_span", m.time_span}};
}

Json lstm_json(const LstmWeights& w) {
    return Json{{"input_size", w.input_size},
                {"hidden_size", w.hidden_size},
                {"num_layers", w.num_layers},
                {"layout", "per layer: W (4H x in), U (4H x H), b (4H), gates i,f,g,o; then w_out (H), b_out"},
                {"params", w.params}};
}

}  // namespace

std::string dump_json(const SegSigmoidModel& m) { return model_json(m).dump(2); }

std::string dump_json(const TrendFitReport& r) {
    return Json{{"n_changepoints", r.n_changepoints},
                {"train_rmse", num(r.train_rmse)},
                {"train_mape", opt(r.train_mape)},
                {"final_loss", num(r.final_loss)},
                {"epochs", r.epochs},
                {"converged", r.converged},
                {"model", model_json(r.model)}}
        .dump(2);
}

SegSigmoidModel segsigmoid_from_json(const std::string& text) {
    const Json j = parse(text, "segsigmoid model");
    try {
        SegSigmoidModel m;
        m.capacity = j.at("capacity").get<double>();
        m.floor = j.value("floor", 0.0);
        m.rate = j.at("rate").get<double>();
        m.offset = j.at("offset").get<double>();
        m.changepoints = j.at("changepoints").get<std::vector<double>>();
        m.deltas = j.at("deltas").get<std::vector<double>>();
        m.gammas = j.at("gammas").get<std::vector<double>>();
        m.laplace_scale = j.at("laplace_scale").get<double>();
        m.cp_range = j.at("cp_range").get<double>();
        m.time_origin = j.at("time_origin").get<std::int64_t>();
        m.time_span = j.at("time_span").get<double>();
        if (m.changepoints.size() != m.deltas.size() || m.deltas.size() != m.gammas.size())
            throw InvalidArgument("segsigmoid model: changepoint arrays differ in length");
        return m;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("segsigmoid model: ") + e.what());
    }
}

std::string dump_json(const GbtModel& m) {
    Json trees = Json::array();
    for (const auto& t : m.trees) {
        Json nodes = Json::array();
        for (const auto& n : t.nodes) {
            if (n.is_leaf()) {
                nodes.push_back(Json{{"leaf", n.weight}, {"grad_sum", n.grad_sum}, {"hess_sum", n.hess_sum}});
            } else {
                nodes.push_back(Json{{"feature", n.feature},
                                     {"threshold", n.threshold},
                                     {"left", n.left},
                                     {"right", n.right},
                                     {"gain", n.gain},
                                     {"grad_sum", n.grad_sum},
                                     {"hess_sum", n.hess_sum},
                                     {"left_grad", n.left_grad},
                                     {"left_hess", n.left_hess},
                                     {"right_grad", n.right_grad},
                                     {"right_hess", n.right_hess}});
            }
        }
        trees.push_back(std::move(nodes));
    }
    return Json{{"learning_rate", m.learning_rate},
                {"base_score", m.base_score},
                {"lambda", m.lambda},
                {"gamma", m.gamma},
                {"max_depth", m.max_depth},
                {"n_rounds", m.n_rounds},
                {"n_features", m.n_features},
                {"trees", std::move(trees)}}
        .dump(2);
}

GbtModel gbt_from_json(const std::string& text) {
    const Json j = parse(text, "gbt model");
    try {
        GbtModel m;
        m.learning_rate = j.at("learning_rate").get<double>();
        m.base_score = j.at("base_score").get<double>();
        m.lambda = j.at("lambda").get<double>();
        m.gamma = j.at("gamma").get<double>();
        m.max_depth = j.at("max_depth").get<int>();
        m.n_rounds = j.at("n_rounds").get<int>();
        m.n_features = j.at("n_features").get<std::size_t>();
        for (const auto& jt : j.at("trees")) {
            RegressionTree t;
            for (const auto& jn : jt) {
                TreeNode n;
                n.grad_sum = jn.at("grad_sum").get<double>();
                n.hess_sum = jn.at("hess_sum").get<double>();
                if (jn.contains("leaf")) {
                    n.weight = jn.at("leaf").get<double>();
                } else {
                    n.feature = jn.at("feature").get<int>();
                    n.threshold = jn.at("threshold").get<double>();
                    n.left = jn.at("left").get<int>();
                    n.right = jn.at("right").get<int>();
                    n.gain = jn.at("gain").get<double>();
                    n.left_grad = jn.at("left_grad").get<double>();
                    n.left_hess = jn.at("left_hess").get<double>();
                    n.right_grad = jn.at("right_grad").get<double>();
                    n.right_hess = jn.at("right_hess").get<double>();
                    if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= m.n_features)
                        throw InvalidArgument("gbt model: split feature out of range");
                }
                t.nodes.push_back(n);
            }
            for (const auto& n : t.nodes)
                if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(n.left) >= t.nodes.size() ||
                                     static_cast<std::size_t>(n.right) >= t.nodes.size()))
                    throw InvalidArgument("gbt model: child index out of range");
            m.trees.push_back(std::move(t));
        }
        return m;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("gbt model: ") + e.what());
    }
}

std::string dump_json(const ClusterLstmModel& m) {
    Json clusters = Json::array();
    for (std::size_t c = 0; c < m.lstms.size(); ++c) {
        clusters.push_back(Json{{"centroid", m.kmeans.centroids[c]},
                                {"mean", m.cluster_norm[c].mean},
                                {"std", m.cluster_norm[c].std},
                                {"final_loss", m.traces.size() > c && !m.traces[c].loss_history.empty()
                                                   ? num(m.traces[c].loss_history.back())
                                                   : Json(nullptr)},
                                {"lstm", lstm_json(m.lstms[c])}});
    }
    return Json{{"window", m.window},
                {"k", m.kmeans.k},
                {"global_mean", m.global.mean},
                {"global_std", m.global.std},
                {"inertia", m.kmeans.inertia},
                {"kmeans_iterations", m.kmeans.iterations},
                {"gate_p_value", num(m.gate_p_value)},
                {"clusters", std::move(clusters)}}
        .dump(2);
}

ClusterLstmModel clusterlstm_from_json(const std::string& text) {
    const Json j = parse(text, "clusterlstm model");
    try {
        ClusterLstmModel m;
        m.window = j.at("window").get<std::size_t>();
        m.kmeans.k = j.at("k").get<std::size_t>();
        m.global = {j.at("global_mean").get<double>(), j.at("global_std").get<double>()};
        m.kmeans.inertia = j.at("inertia").get<double>();
        m.kmeans.iterations = j.value("kmeans_iterations", 0);
        if (j.contains("gate_p_value") && !j.at("gate_p_value").is_null())
            m.gate_p_value = j.at("gate_p_value").get<double>();
        for (const auto& jc : j.at("clusters")) {
            m.kmeans.centroids.push_back(jc.at("centroid").get<std::vector<double>>());
            m.cluster_norm.push_back({jc.at("mean").get<double>(), jc.at("std").get<double>()});
            const auto& jl = jc.at("lstm");
            LstmWeights w;
            w.input_size = jl.at("input_size").get<std::size_t>();
            w.hidden_size = jl.at("hidden_size").get<std::size_t>();
            w.num_layers = jl.at("num_layers").get<std::size_t>();
            w.params = jl.at("params").get<std::vector<double>>();
            if (w.params.size() != LstmWeights::param_count(w.input_size, w.hidden_size, w.num_layers))
                throw InvalidArgument("clusterlstm model: parameter count does not match the layer shapes");
            m.lstms.push_back(std::move(w));
        }
        if (m.lstms.size() != m.kmeans.k) throw InvalidArgument("clusterlstm model: expected one LSTM per cluster");
        for (const auto& c : m.kmeans.centroids)
            if (c.size() != m.window) throw InvalidArgument("clusterlstm model: centroid length differs from window");
        return m;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("clusterlstm model: ") + e.what());
    }
}

std::string dump_json(const GaResult& r) {
    Json hist = Json::array();
    for (double v : r.history) hist.push_back(num(v));
    return Json{{"best_alpha", r.best_alpha},
                {"best_tau", r.best_tau},
                {"best_fitness", num(r.best_fitness)},
                {"history", std::move(hist)}}
        .dump(2);
}

namespace {

Json diagnostics_json(const std::vector<Diagnostic>& ds) {
    Json out = Json::array();
    for (const auto& d : ds) {
        Json e = test_result(d.result);
        e["test"] = d.name;
        e["warning"] = d.warning;
        out.push_back(std::move(e));
    }
    return out;
}

Json config_json(const PipelineConfig& c) {
    const auto& s = c.synthetic;
    return Json{
        {"input", c.input ? Json(c.input->string()) : Json(nullptr)},
        {"value_column", c.value_column},
        {"synthetic",
         {{"length", s.length},
          {"cubic", s.cubic},
          {"amplitude", s.amplitude},
          {"period", s.period},
          {"phase", s.phase},
          {"ar_phi", s.ar_phi},
          {"ar_sigma", s.ar_sigma},
          {"noise_sigma", s.noise_sigma},
          {"regime_switching", s.regime_switching},
          {"regime_low", s.regime_low},
          {"regime_high", s.regime_high},
          {"regime_block", s.regime_block},
          {"unit_variance", s.unit_variance},
          {"seed", s.seed},
          {"start", s.start},
          {"step", s.step}}},
        {"kalman",
         {{"process_var", c.kalman.process_var},
          {"measure_var", c.kalman.measure_var},
          {"init_state", opt(c.kalman.init_state)},
          {"init_cov", opt(c.kalman.init_cov)}}},
        {"skip_kalman", c.skip_kalman},
        {"split_ratio", c.split_ratio},
        {"split_index", c.split_index ? Json(*c.split_index) : Json(nullptr)},
        {"test_size", c.test_size ? Json(*c.test_size) : Json(nullptr)},
        {"vmd",
         {{"k_modes", c.vmd.k_modes},
          {"alpha", c.vmd.alpha},
          {"tau", c.vmd.tau},
          {"tol", c.vmd.tol},
          {"max_iter", c.vmd.max_iter},
          {"dc_mode", c.vmd.dc_mode}}},
        {"ga",
         {{"pop_size", c.ga.pop_size},
          {"generations", c.ga.generations},
          {"crossover_p", c.ga.crossover_p},
          {"mutation_p", c.ga.mutation_p},
          {"alpha_bounds", {c.ga.alpha_bounds.first, c.ga.alpha_bounds.second}},
          {"tau_bounds", {c.ga.tau_bounds.first, c.ga.tau_bounds.second}},
          {"seed", c.ga.seed},
          {"tournament_size", c.ga.tournament_size},
          {"mutation_scale", c.ga.mutation_scale},
          {"threads", c.ga.threads}}},
        {"skip_ga", c.skip_ga},
        {"trend",
         {{"alpha", c.trend.alpha},
          {"beta", c.trend.beta},
          {"cp_range", c.trend.cp_range},
          {"laplace_scale", c.trend.laplace_scale},
          {"capacity", opt(c.trend.capacity)},
          {"max_epochs", c.trend.max_epochs},
          {"tol", c.trend.tol}}},
        {"gbt",
         {{"max_depth", c.gbt.max_depth},
          {"learning_rate", c.gbt.learning_rate},
          {"n_rounds", c.gbt.n_rounds},
          {"lambda", c.gbt.lambda},
          {"gamma", c.gbt.gamma},
          {"early_stopping_rounds", c.gbt.early_stopping_rounds},
          {"validation_fraction", c.gbt.validation_fraction},
          {"threads", c.gbt.threads}}},
        {"lag", c.lag},
        {"residual",
         {{"k", c.residual.k},
          {"window", c.residual.window},
          {"hidden", c.residual.hidden},
          {"layers", c.residual.layers},
          {"epochs", c.residual.epochs},
          {"learning_rate", c.residual.learning_rate},
          {"seed", c.residual.seed},
          {"force", c.residual.force},
          {"min_cluster_size", c.residual.min_cluster_size},
          {"threads", c.residual.threads}}},
        {"periodic_model", to_string(c.periodic_model)},
        {"residual_model", to_string(c.residual_model)},
        {"seed", c.seed},
        {"granger_lag", c.granger_lag}};
}

}  // namespace

std::string dump_json(const std::vector<Diagnostic>& diagnostics) { return diagnostics_json(diagnostics).dump(2); }

std::string vmd_summary_json(const Decomposition& d, double alpha, double tau) {
    return Json{{"alpha", alpha},
                {"tau", tau},
                {"center_freqs", d.center_freqs},
                {"recon_mse", d.recon_mse},
                {"iterations", d.iterations},
                {"hit_max_iter", d.hit_max_iter}}
        .dump(2);
}

std::string dump_json(const MetricsReport& m) { return metrics(m).dump(2); }

std::string dump_json(const ForecastReport& r, const PipelineConfig& cfg) {
    Json timings = Json::object();
    for (const auto& [k, v] : r.timings) timings[k] = v;
    Json j{{"train_size", r.train_size},
           {"test_size", r.test_size},
           {"metrics",
            {{"trend", metrics(r.trend_metrics)},
             {"periodic", metrics(r.periodic_metrics)},
             {"residual", metrics(r.residual_metrics)},
             {"total", metrics(r.total_metrics)},
             {"persistence_baseline", metrics(r.baseline_metrics)}}},
           {"decomposition",
            {{"alpha", r.alpha},
             {"tau", r.tau},
             {"center_freqs", r.center_freqs},
             {"recon_mse", r.recon_mse},
             {"iterations", r.vmd_iterations}}},
           {"n_changepoints", r.n_changepoints},
           {"gbt_rounds", r.gbt_rounds},
           {"diagnostics", diagnostics_json(r.diagnostics)},
           {"warnings", r.warnings},
           {"config", config_json(cfg)},
           {"timings_s", std::move(timings)}};
    if (r.ga) j["ga"] = Json::parse(dump_json(*r.ga));
    return j.dump(2);
}

std::string dump_json(const AblationReport& r, const PipelineConfig& cfg) {
    Json cells = Json::array();
    for (const auto& c : r.cells)
        cells.push_back(Json{{"periodic_model", to_string(c.periodic)},
                             {"residual_model", to_string(c.residual)},
                             {"total", metrics(c.total)},
                             {"periodic", metrics(c.periodic_metrics)},
                             {"residual", metrics(c.residual_metrics)}});
    return Json{{"train_size", r.train_size},
                {"test_size", r.test_size},
                {"trend", metrics(r.trend_metrics)},
                {"persistence_baseline", metrics(r.baseline_metrics)},
                {"cells", std::move(cells)},
                {"config", config_json(cfg)}}
        .dump(2);
}

std::string dump_json(const std::vector<RollingFold>& folds) {
    Json out = Json::array();
    for (const auto& f : folds)
        out.push_back(Json{{"train_size", f.train_size}, {"total", metrics(f.total)}, {"baseline", metrics(f.baseline)}});
    return out.dump(2);
}

std::string dump_json(const PipelineConfig& cfg) { return config_json(cfg).dump(2); }

PipelineConfig config_from_json(const std::string& text, PipelineConfig c) {
    const Json j = parse(text, "config");
    Reader r(j, "");
    std::optional<std::string> input;
    r.get_optional("input", input);
    if (input) c.input = *input;
    r.get("value_column", c.value_column);
    if (r.has("synthetic")) {
        auto s = r.child("synthetic");
        auto& o = c.synthetic;
        s.get("length", o.length);
        s.get("cubic", o.cubic);
        s.get("amplitude", o.amplitude);
        s.get("period", o.period);
        s.get("phase", o.phase);
        s.get("ar_phi", o.ar_phi);
        s.get("ar_sigma", o.ar_sigma);
        s.get("noise_sigma", o.noise_sigma);
        s.get("regime_switching", o.regime_switching);
        s.get("regime_low", o.regime_low);
        s.get("regime_high", o.regime_high);
        s.get("regime_block", o.regime_block);
        s.get("unit_variance", o.unit_variance);
        s.get("seed", o.seed);
        s.get("start", o.start);
        s.get("step", o.step);
        s.finish();
    }
    if (r.has("kalman")) {
        auto k = r.child("kalman");
        k.get("process_var", c.kalman.process_var);
        k.get("measure_var", c.kalman.measure_var);
        k.get_optional("init_state", c.kalman.init_state);
        k.get_optional("init_cov", c.kalman.init_cov);
        k.finish();
    }
    r.get("skip_kalman", c.skip_kalman);
    r.get("split_ratio", c.split_ratio);
    r.get_optional("split_index", c.split_index);
    r.get_optional("test_size", c.test_size);
    if (r.has("vmd")) {
        auto v = r.child("vmd");
        v.get("k_modes", c.vmd.k_modes);
        v.get("alpha", c.vmd.alpha);
        v.get("tau", c.vmd.tau);
        v.get("tol", c.vmd.tol);
        v.get("max_iter", c.vmd.max_iter);
        v.get("dc_mode", c.vmd.dc_mode);
        v.finish();
    }
    if (r.has("ga")) {
        auto g = r.child("ga");
        g.get("pop_size", c.ga.pop_size);
        g.get("generations", c.ga.generations);
        g.get("crossover_p", c.ga.crossover_p);
        g.get("mutation_p", c.ga.mutation_p);
        g.get("alpha_bounds", c.ga.alpha_bounds);
        g.get("tau_bounds", c.ga.tau_bounds);
        g.get("seed", c.ga.seed);
        g.get("tournament_size", c.ga.tournament_size);
        g.get("mutation_scale", c.ga.mutation_scale);
        g.get("threads", c.ga.threads);
        g.finish();
    }
    r.get("skip_ga", c.skip_ga);
    if (r.has("trend")) {
        auto t = r.child("trend");
        t.get("alpha", c.trend.alpha);
        t.get("beta", c.trend.beta);
        t.get("cp_range", c.trend.cp_range);
        t.get("laplace_scale", c.trend.laplace_scale);
        t.get_optional("capacity", c.trend.capacity);
        t.get("max_epochs", c.trend.max_epochs);
        t.get("tol", c.trend.tol);
        t.finish();
    }
    if (r.has("gbt")) {
        auto g = r.child("gbt");
        g.get("max_depth", c.gbt.max_depth);
        g.get("learning_rate", c.gbt.learning_rate);
        g.get("n_rounds", c.gbt.n_rounds);
        g.get("lambda", c.gbt.lambda);
        g.get("gamma", c.gbt.gamma);
        g.get("early_stopping_rounds", c.gbt.early_stopping_rounds);
        g.get("validation_fraction", c.gbt.validation_fraction);
        g.get("threads", c.gbt.threads);
        g.finish();
    }
    r.get("lag", c.lag);
    if (r.has("residual")) {
        auto l = r.child("residual");
        l.get("k", c.residual.k);
        l.get("window", c.residual.window);
        l.get("hidden", c.residual.hidden);
        l.get("layers", c.residual.layers);
        l.get("epochs", c.residual.epochs);
        l.get("learning_rate", c.residual.learning_rate);
        l.get("seed", c.residual.seed);
        l.get("force", c.residual.force);
        l.get("min_cluster_size", c.residual.min_cluster_size);
        l.get("threads", c.residual.threads);
        l.finish();
    }
    std::string pm = to_string(c.periodic_model);
    std::string rm = to_string(c.residual_model);
    r.get("periodic_model", pm);
    r.get("residual_model", rm);
    c.periodic_model = parse_periodic_model(pm);
    c.residual_model = parse_residual_model(rm);
    r.get("seed", c.seed);
    r.get("granger_lag", c.granger_lag);
    r.finish();
    return c;
}

}  // namespace vsxc
