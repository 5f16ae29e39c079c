#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vsxc/ols.hpp"

namespace vsxc {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject_at_05 = false;
    std::string null_hypothesis;
};

/// Two-sided Mann-Kendall trend test with tie-corrected variance and
/// continuity correction. Requires n >= 8.
[[nodiscard]] TestResult mann_kendall(std::span<const double> x);

/// Mann-Kendall S statistic and tie-corrected Var(S).
struct MannKendallStats {
    long long s = 0;
    double var_s = 0.0;
};
[[nodiscard]] MannKendallStats mann_kendall_stats(std::span<const double> x);

/// Sample autocorrelation rho_0..rho_max_lag (rho_0 == 1).
[[nodiscard]] std::vector<double> acf(std::span<const double> x, std::size_t max_lag);

/// Ljung-Box portmanteau test; chi-square reference with `lag` degrees of freedom.
[[nodiscard]] TestResult ljung_box(std::span<const double> x, std::size_t lag);

struct GrangerResult {
    TestResult test;
    double sse_restricted = 0.0;
    double sse_unrestricted = 0.0;
    std::size_t df_num = 0;
    std::size_t df_den = 0;
};

/// F test of whether `cause` lags 1..lag improve an autoregression of
/// `target` on its own lags 1..lag (both with intercept).
[[nodiscard]] GrangerResult granger_test(std::span<const double> target, std::span<const double> cause,
                                         std::size_t lag);

struct OutlierReport {
    std::vector<double> studentized;  ///< externally studentized residuals t_i
    double bc_threshold = 0.0;        ///< beta * t(1 - alpha / (2n); n - p - 1)
    std::vector<std::size_t> outlier_indices;
};

/// Externally studentized residuals t_i = r_i sqrt((n-p-1) / (SSE(1-h_ii) - r_i^2))
/// against a Bonferroni critical value scaled by beta. Points whose
/// denominator is not positive (the fit passes through them once they are
/// held out) are flagged with t_i = +/-inf. An exact fit yields no outliers.
[[nodiscard]] OutlierReport studentized_outliers(const OlsFit& fit, double alpha = 0.05, double beta = 1.0 / 6.0);

/// Bonferroni critical value before beta scaling.
[[nodiscard]] double bonferroni_critical_value(std::size_t n, std::size_t p, double alpha);

}  // namespace vsxc
