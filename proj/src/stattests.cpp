#include "vsxc/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vsxc/error.hpp"
#include "vsxc/special.hpp"

namespace vsxc {

namespace {

TestResult make_result(double statistic, double p, std::string null_hypothesis) {
    p = std::clamp(p, 0.0, 1.0);
    return {statistic, p, p < 0.05, std::move(null_hypothesis)};
}

}  // namespace

MannKendallStats mann_kendall_stats(std::span<const double> x) {
    const std::size_t n = x.size();
    MannKendallStats st;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) st.s += (x[j] > x[i]) - (x[j] < x[i]);

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const auto t = static_cast<double>(j - i);
        tie_term += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    const auto nn = static_cast<double>(n);
    st.var_s = (nn * (nn - 1.0) * (2.0 * nn + 5.0) - tie_term) / 18.0;
    return st;
}

TestResult mann_kendall(std::span<const double> x) {
    if (x.size() < 8) throw InvalidArgument("mann_kendall: series too short (need >= 8 samples)");
    const auto st = mann_kendall_stats(x);
    double z = 0.0;
    if (st.var_s > 0.0) {
        if (st.s > 0)
            z = (static_cast<double>(st.s) - 1.0) / std::sqrt(st.var_s);
        else if (st.s < 0)
            z = (static_cast<double>(st.s) + 1.0) / std::sqrt(st.var_s);
    }
    const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
    return make_result(z, p, "no monotonic trend");
}

std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (max_lag >= n) throw InvalidArgument("acf: max_lag must be smaller than the series length");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (!(denom > 0.0)) throw InvalidArgument("acf: constant series has zero variance");
    std::vector<double> rho(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) num += (x[t] - mean) * (x[t + k] - mean);
        rho[k] = num / denom;
    }
    rho[0] = 1.0;
    return rho;
}

TestResult ljung_box(std::span<const double> x, std::size_t lag) {
    if (lag < 1) throw InvalidArgument("ljung_box: lag must be >= 1");
    if (x.size() <= lag + 1) throw InvalidArgument("ljung_box: series too short for the requested lag");
    const auto rho = acf(x, lag);
    const auto n = static_cast<double>(x.size());
    double q = 0.0;
    for (std::size_t k = 1; k <= lag; ++k) q += rho[k] * rho[k] / (n - static_cast<double>(k));
    q *= n * (n + 2.0);
    return make_result(q, chi2_sf(q, static_cast<double>(lag)), "series is white noise");
}

GrangerResult granger_test(std::span<const double> target, std::span<const double> cause, std::size_t lag) {
    if (target.size() != cause.size()) throw InvalidArgument("granger_test: series differ in length");
    if (lag < 1) throw InvalidArgument("granger_test: lag must be >= 1");
    const std::size_t n = target.size();
    if (n <= 2 * lag + 1) throw InvalidArgument("granger_test: series too short for the requested lag");
    const std::size_t rows = n - lag;
    if (rows < 2 * lag + 2)
        throw InvalidArgument("granger_test: not enough observations for the unrestricted regression");

    // Columns: intercept, target lags 1..lag, cause lags 1..lag. The first
    // lag + 1 columns form the restricted model.
    Matrix design(rows, 2 * lag + 1);
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + lag;
        y[r] = target[t];
        design(r, 0) = 1.0;
        for (std::size_t i = 1; i <= lag; ++i) {
            design(r, i) = target[t - i];
            design(r, lag + i) = cause[t - i];
        }
    }
    // Lags of very smooth series can be numerically collinear; those columns
    // are dropped and the degrees of freedom follow the effective rank.
    const auto kept = independent_columns(design);
    const auto split = std::find_if(kept.begin(), kept.end(), [&](std::size_t c) { return c > lag; });
    const std::vector<std::size_t> kept_restricted(kept.begin(), split);

    GrangerResult g;
    g.sse_restricted = ols(select_columns(design, kept_restricted), y).sse;
    g.sse_unrestricted = ols(select_columns(design, kept), y).sse;
    g.df_num = kept.size() - kept_restricted.size();
    g.df_den = rows - kept.size();
    if (g.df_num == 0) {
        g.sse_unrestricted = g.sse_restricted;
        g.test = make_result(0.0, 1.0, "cause does not Granger-cause target");
        return g;
    }

    double f = 0.0;
    if (g.sse_unrestricted > 0.0) {
        f = ((g.sse_restricted - g.sse_unrestricted) / static_cast<double>(g.df_num)) /
            (g.sse_unrestricted / static_cast<double>(g.df_den));
        f = std::max(f, 0.0);
    } else if (g.sse_restricted > 0.0) {
        f = std::numeric_limits<double>::infinity();
    }
    const double p = f_sf(f, static_cast<double>(g.df_num), static_cast<double>(g.df_den));
    g.test = make_result(f, p, "cause does not Granger-cause target");
    return g;
}

double bonferroni_critical_value(std::size_t n, std::size_t p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("bonferroni: alpha must lie in (0, 1)");
    if (n < p + 2) throw InvalidArgument("bonferroni: need n - p - 1 >= 1");
    return t_quantile(1.0 - alpha / (2.0 * static_cast<double>(n)), static_cast<double>(n - p - 1));
}

OutlierReport studentized_outliers(const OlsFit& fit, double alpha, double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("studentized_outliers: beta must be positive");
    const std::size_t n = fit.n;
    const std::size_t p = fit.p;
    if (fit.residuals.size() != n || fit.hat_diag.size() != n)
        throw InvalidArgument("studentized_outliers: fit is incomplete");

    OutlierReport rep;
    rep.bc_threshold = beta * bonferroni_critical_value(n, p, alpha);
    rep.studentized.assign(n, 0.0);

    // Residuals at round-off level relative to the data count as an exact fit.
    double y_ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = fit.fitted[i] + fit.residuals[i];
        y_ss += yi * yi;
    }
    if (fit.sse <= 1e-24 * y_ss || fit.sse == 0.0) return rep;

    const auto dof = static_cast<double>(n - p - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = fit.residuals[i];
        const double denom = fit.sse * (1.0 - fit.hat_diag[i]) - r * r;
        double t = 0.0;
        if (denom > 1e-14 * fit.sse)
            t = r * std::sqrt(dof / denom);
        else if (r != 0.0)
            t = std::copysign(std::numeric_limits<double>::infinity(), r);
        rep.studentized[i] = t;
        if (std::abs(t) > rep.bc_threshold) rep.outlier_indices.push_back(i);
    }
    return rep;
}

}  // namespace vsxc
