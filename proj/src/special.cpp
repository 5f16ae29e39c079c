#include "vsxc/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "vsxc/error.hpp"

namespace vsxc {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

void check_df(double df, const char* who) {
    if (!(df >= 1.0) || !std::isfinite(df)) throw InvalidArgument(std::string(who) + ": degrees of freedom must be >= 1");
}

void check_x(double x, const char* who) {
    if (std::isnan(x)) throw InvalidArgument(std::string(who) + ": x is NaN");
}

// Lentz's method for the incomplete beta continued fraction.
double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    return h;
}

double gamma_series(double a, double x) {
    double sum = 1.0 / a;
    double del = sum;
    double ap = a;
    for (int n = 0; n < 10 * kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10 * kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw InvalidArgument("gamma_p: a must be positive");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw InvalidArgument("gamma_q: a must be positive");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return x < a + 1.0 ? 1.0 - gamma_series(a, x) : gamma_cf(a, x);
}

double beta_inc(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("beta_inc: shape parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_bt =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double t_cdf(double x, double df) {
    check_df(df, "t_cdf");
    check_x(x, "t_cdf");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * beta_inc(0.5 * df, 0.5, df / (df + x * x));
    return x > 0.0 ? 1.0 - tail : tail;
}

double f_cdf(double x, double d1, double d2) {
    check_df(d1, "f_cdf");
    check_df(d2, "f_cdf");
    check_x(x, "f_cdf");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return beta_inc(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_sf(double x, double d1, double d2) {
    check_df(d1, "f_sf");
    check_df(d2, "f_sf");
    check_x(x, "f_sf");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return beta_inc(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x));
}

double chi2_cdf(double x, double df) {
    check_df(df, "chi2_cdf");
    check_x(x, "chi2_cdf");
    return gamma_p(0.5 * df, 0.5 * std::max(x, 0.0));
}

double chi2_sf(double x, double df) {
    check_df(df, "chi2_sf");
    check_x(x, "chi2_sf");
    return gamma_q(0.5 * df, 0.5 * std::max(x, 0.0));
}

double t_quantile(double p, double df) {
    check_df(df, "t_quantile");
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("t_quantile: p must lie in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -t_quantile(1.0 - p, df);
    // Bracket, then bisect on the upper tail (better conditioned near p -> 1).
    const double target_tail = 1.0 - p;
    auto tail = [df](double t) { return 0.5 * beta_inc(0.5 * df, 0.5, df / (df + t * t)); };
    double lo = 0.0;
    double hi = 1.0;
    while (tail(hi) > target_tail) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) > target_tail)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace vsxc
