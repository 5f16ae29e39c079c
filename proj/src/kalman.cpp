#include "vsxc/kalman.hpp"

#include <cmath>

#include "vsxc/error.hpp"

namespace vsxc {

KalmanTrace kalman_trace(std::span<const double> z, const KalmanConfig& cfg) {
    if (z.empty()) throw InvalidArgument("kalman: empty series");
    const double q = cfg.process_var;
    const double r = cfg.measure_var;
    if (!(q > 0.0) || !(r > 0.0)) throw InvalidArgument("kalman: Q and R must be positive");
    double x = cfg.init_state.value_or(z[0]);
    double p = cfg.init_cov.value_or(r);
    if (!(p > 0.0)) throw InvalidArgument("kalman: P0 must be positive");

    KalmanTrace tr;
    tr.state.reserve(z.size());
    tr.cov.reserve(z.size());
    tr.gain.reserve(z.size());
    tr.state.push_back(x);
    tr.cov.push_back(p);
    tr.gain.push_back(0.0);
    for (std::size_t i = 1; i < z.size(); ++i) {
        const double p_prior = p + q;
        const double k = p_prior / (p_prior + r);
        x += k * (z[i] - x);
        p = (1.0 - k) * p_prior;
        tr.state.push_back(x);
        tr.cov.push_back(p);
        tr.gain.push_back(k);
    }
    return tr;
}

TimeSeries kalman_smooth(const TimeSeries& series, const KalmanConfig& cfg) {
    if (series.empty()) throw InvalidArgument("kalman: empty series");
    return series.with_values(kalman_trace(series.values(), cfg).state);
}

double kalman_steady_state_cov(double q, double r) {
    // P^2 + qP - qr = 0, positive root.
    return 0.5 * (-q + std::sqrt(q * q + 4.0 * q * r));
}

}  // namespace vsxc
