#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "vsxc/error.hpp"
#include "vsxc/kalman.hpp"

using namespace vsxc;

TEST_CASE("two-step example") {
    KalmanConfig cfg;
    cfg.process_var = 1.0;
    cfg.measure_var = 16.0;
    cfg.init_state = 0.0;
    cfg.init_cov = 16.0;
    const std::vector<double> z{0.0, 16.0};
    const auto tr = kalman_trace(z, cfg);
    CHECK(tr.gain[1] == doctest::Approx(17.0 / 33.0).epsilon(1e-15));
    CHECK(tr.state[1] == doctest::Approx(16.0 * 17.0 / 33.0).epsilon(1e-15));
    CHECK(tr.state[1] == doctest::Approx(8.2424).epsilon(1e-4));
}

TEST_CASE("constant input stays constant") {
    const auto out = kalman_smooth(TimeSeries::from_values({5, 5, 5, 5}));
    CHECK(std::abs(out[3] - 5.0) < 1e-9);
}

TEST_CASE("huge process variance tracks the observations") {
    KalmanConfig cfg;
    cfg.process_var = 1e12;
    const std::vector<double> z{3.0, -7.0, 12.5, 100.0, -0.5};
    const auto tr = kalman_trace(z, cfg);
    for (std::size_t i = 0; i < z.size(); ++i)
        CHECK(std::abs(tr.state[i] - z[i]) <= 1e-6 * std::max(1.0, std::abs(z[i])));
}

TEST_CASE("matches the hand-unrolled recursion") {
    const auto z = oracle::white_noise(50, 4.0, 11);
    const auto ref = oracle::kalman_reference(z, 1.0, 16.0, z[0], 16.0);
    const auto out = kalman_smooth(TimeSeries::from_values(z));
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(out[i] - ref[i]) < 1e-12);
}

TEST_CASE("length and timestamps are preserved") {
    const auto in = TimeSeries::from_values(oracle::white_noise(30, 1.0, 2), 1000, 60);
    const auto out = kalman_smooth(in);
    CHECK(out.size() == in.size());
    CHECK(std::equal(out.timestamps().begin(), out.timestamps().end(), in.timestamps().begin()));
}

TEST_CASE("gain stays in (0, 1) and covariance reaches the Riccati fixed point") {
    const auto z = oracle::white_noise(200, 1.0, 3);
    const auto tr = kalman_trace(z, {});
    for (std::size_t i = 1; i < z.size(); ++i) {
        CHECK(tr.gain[i] > 0.0);
        CHECK(tr.gain[i] < 1.0);
    }
    // Independent fixed point: P^2 + Q P - Q R = 0 for the prior-free form.
    const double q = 1.0, r = 16.0;
    const double p_star = (-q + std::sqrt(q * q + 4.0 * q * r)) / 2.0;
    CHECK(std::abs(tr.cov.back() - p_star) < 1e-9);
    CHECK(std::abs(kalman_steady_state_cov(q, r) - p_star) < 1e-12);
    const double fp = (p_star + q) * r / (p_star + q + r);
    CHECK(std::abs(fp - p_star) < 1e-12);
}

TEST_CASE("smoothing reduces differenced variance when R > Q") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto z = oracle::white_noise(400, 4.0, seed);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += std::sin(0.01 * static_cast<double>(i));
        const auto out = kalman_smooth(TimeSeries::from_values(z));
        std::vector<double> dr, df;
        for (std::size_t i = 1; i < z.size(); ++i) {
            dr.push_back(z[i] - z[i - 1]);
            df.push_back(out[i] - out[i - 1]);
        }
        CHECK(oracle::variance(df) < oracle::variance(dr));
    }
}

TEST_CASE("invalid configuration") {
    KalmanConfig cfg;
    cfg.process_var = 0.0;
    CHECK_THROWS_AS((void)kalman_trace(std::vector<double>{1.0, 2.0}, cfg), InvalidArgument);
    CHECK_THROWS_AS((void)kalman_trace(std::vector<double>{}, {}), InvalidArgument);
}
