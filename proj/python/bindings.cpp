#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vsxc/error.hpp"
#include "vsxc/kalman.hpp"
#include "vsxc/pipeline.hpp"
#include "vsxc/serialize.hpp"
#include "vsxc/stattests.hpp"
#include "vsxc/synthetic.hpp"
#include "vsxc/vmd.hpp"

namespace py = pybind11;
using namespace vsxc;

namespace {

py::dict test_dict(const TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["reject_at_05"] = r.reject_at_05;
    d["null_hypothesis"] = r.null_hypothesis;
    return d;
}

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

PipelineConfig make_config(const std::string& config_json, std::optional<std::uint64_t> seed) {
    auto cfg = config_json.empty() ? PipelineConfig{} : config_from_json(config_json);
    if (seed) {
        cfg.seed = *seed;
        cfg.apply_seed();
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_vsxc, m) {
    m.doc() = "Decomposition-based displacement forecasting core";

    py::register_exception<Error>(m, "VsxcError", PyExc_ValueError);

    m.def(
        "kalman_smooth",
        [](const std::vector<double>& z, double process_var, double measure_var) {
            KalmanConfig cfg;
            cfg.process_var = process_var;
            cfg.measure_var = measure_var;
            return kalman_trace(z, cfg).state;
        },
        py::arg("values"), py::arg("process_var") = 1.0, py::arg("measure_var") = 16.0);

    m.def(
        "vmd",
        [](const std::vector<double>& x, int k, double alpha, double tau) {
            VmdParams p;
            p.k_modes = k;
            p.alpha = alpha;
            p.tau = tau;
            const auto r = vmd(x, p);
            py::dict d;
            d["modes"] = r.modes;
            d["center_freqs"] = r.center_freqs;
            d["recon_mse"] = r.recon_mse;
            d["iterations"] = r.iterations;
            return d;
        },
        py::arg("values"), py::arg("k") = 3, py::arg("alpha") = 2000.0, py::arg("tau") = 0.99877);

    m.def(
        "decompose",
        [](const std::vector<double>& x, double alpha, double tau) {
            VmdParams p;
            p.alpha = alpha;
            p.tau = tau;
            const auto d = vmd_decompose(TimeSeries::from_values(x), p);
            py::dict out;
            out["trend"] = to_vector(d.trend.values());
            out["periodic"] = to_vector(d.periodic.values());
            out["residual"] = to_vector(d.residual.values());
            out["recon_mse"] = d.recon_mse;
            return out;
        },
        py::arg("values"), py::arg("alpha") = 2000.0, py::arg("tau") = 0.99877);

    m.def("mann_kendall", [](const std::vector<double>& x) { return test_dict(mann_kendall(x)); }, py::arg("values"));
    m.def(
        "ljung_box", [](const std::vector<double>& x, std::size_t lag) { return test_dict(ljung_box(x, lag)); },
        py::arg("values"), py::arg("lag") = 10);
    m.def(
        "granger",
        [](const std::vector<double>& target, const std::vector<double>& cause, std::size_t lag) {
            const auto r = granger_test(target, cause, lag);
            auto d = test_dict(r.test);
            d["df_num"] = r.df_num;
            d["df_den"] = r.df_den;
            return d;
        },
        py::arg("target"), py::arg("cause"), py::arg("lag") = 4);

    m.def(
        "synthetic",
        [](std::size_t length, std::uint64_t seed, bool unit_variance, bool regime_switching) {
            SyntheticSpec s;
            s.length = length;
            s.seed = seed;
            s.unit_variance = unit_variance;
            s.regime_switching = regime_switching;
            const auto g = generate_synthetic(s);
            py::dict d;
            d["y"] = to_vector(g.y.values());
            d["trend"] = g.trend;
            d["periodic"] = g.periodic;
            d["ar"] = g.ar;
            d["noise"] = g.noise;
            return d;
        },
        py::arg("length") = 2426, py::arg("seed") = 0, py::arg("unit_variance") = false,
        py::arg("regime_switching") = false);

    m.def(
        "run_pipeline_json",
        [](const std::string& config_json, std::optional<std::uint64_t> seed) {
            const auto cfg = make_config(config_json, seed);
            py::gil_scoped_release release;
            return dump_json(run_pipeline(cfg), cfg);
        },
        py::arg("config_json") = "", py::arg("seed") = py::none());

    m.def(
        "run_ablation_json",
        [](const std::string& config_json, std::optional<std::uint64_t> seed) {
            const auto cfg = make_config(config_json, seed);
            py::gil_scoped_release release;
            return dump_json(run_ablation(cfg), cfg);
        },
        py::arg("config_json") = "", py::arg("seed") = py::none());

    m.def("default_config_json", [] { return dump_json(PipelineConfig{}); });
}
