#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vsxc/error.hpp"
#include "vsxc/series.hpp"

using namespace vsxc;

TEST_CASE("parse_csv reads a three-row file") {
    const auto s = parse_csv("timestamp,value\n0,1.0\n3600,2.0\n7200,3.0\n", "value");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == 1.0);
    CHECK(s[2] == 3.0);
    CHECK(s.timestamps()[1] == 3600);
}

TEST_CASE("parse_csv without a timestamp column synthesizes hourly stamps") {
    const auto s = parse_csv("value\n4\n5\n", "value");
    REQUIRE(s.size() == 2);
    CHECK(s.timestamps()[1] == kHourSeconds);
}

TEST_CASE("parse_csv accepts ISO-8601 timestamps") {
    const auto s = parse_csv("timestamp,value\n2020-01-01T00:00:00Z,1\n2020-01-01 01:00,2\n", "value");
    CHECK(s.timestamps()[1] - s.timestamps()[0] == 3600);
    CHECK(s.timestamps()[0] == 1577836800);
}

TEST_CASE("a blank value cell is a parse error naming the row") {
    try {
        (void)parse_csv("timestamp,value\n0,1\n3600,\n7200,3\n", "value");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("out-of-order timestamps are a monotonicity error") {
    CHECK_THROWS_AS((void)parse_csv("timestamp,value\n0,1\n7200,2\n3600,3\n", "value"), MonotonicityError);
    CHECK_THROWS_AS((void)parse_csv("timestamp,value\n0,1\n0,2\n", "value"), MonotonicityError);
}

TEST_CASE("missing file and missing column have distinct errors") {
    CHECK_THROWS_AS((void)load_csv("/nonexistent/dir/file.csv", "value"), IoError);
    CHECK_THROWS_AS((void)parse_csv("timestamp,other\n0,1\n", "value"), ParseError);
}

TEST_CASE("write_csv and load_csv round trip") {
    const auto path = std::filesystem::temp_directory_path() / "vsxc_series_roundtrip.csv";
    const auto s = TimeSeries::from_values({1.5, -2.25, 1e-17, 12345.678901234567}, 100, 60);
    write_csv(path, s, "disp");
    const auto back = load_csv(path, "disp");
    CHECK(back == s);
    std::filesystem::remove(path);
}

TEST_CASE("TimeSeries rejects inconsistent input") {
    CHECK_THROWS_AS(TimeSeries({0, 1}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(TimeSeries({0, 0}, {1.0, 2.0}), MonotonicityError);
    CHECK_THROWS_AS(TimeSeries({0, 1}, {1.0, NAN}), InvalidArgument);
}

TEST_CASE("split uses the floor rule") {
    auto make = [](std::size_t n) { return TimeSeries::from_values(std::vector<double>(n, 1.0)); };
    auto s = split(make(2426), 0.9);
    CHECK(s.train.size() == 2183);
    CHECK(s.test.size() == 243);
    s = split(make(10), 0.5);
    CHECK(s.train.size() == 5);
    CHECK(s.test.size() == 5);
    s = split(make(10), 0.99);
    CHECK(s.train.size() == 9);
    CHECK(s.test.size() == 1);
}

TEST_CASE("split errors") {
    const auto ts = TimeSeries::from_values({1, 2, 3});
    CHECK_THROWS_AS((void)split(ts, 0.0), InvalidArgument);
    CHECK_THROWS_AS((void)split(ts, 1.0), InvalidArgument);
    CHECK_THROWS_AS((void)split(TimeSeries::from_values({1}), 0.5), InvalidArgument);
    CHECK_THROWS_AS((void)split_at(ts, 3), InvalidArgument);
}

TEST_CASE("split preserves order and content") {
    std::vector<double> v(37);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) * 0.5;
    const auto ts = TimeSeries::from_values(v);
    for (double ratio : {0.1, 0.37, 0.5, 0.9}) {
        const auto s = split(ts, ratio);
        CHECK(s.train.size() + s.test.size() == ts.size());
        CHECK(s.train.size() == static_cast<std::size_t>(std::floor(ratio * 37)));
        CHECK(s.test.timestamps()[0] > s.train.timestamps().back());
        CHECK(s.test[0] == ts[s.train.size()]);
    }
}

TEST_CASE("rmse examples") {
    const std::vector<double> a{2, 4}, b{1, 2};
    CHECK(rmse(a, a) == 0.0);
    CHECK(rmse(a, b) == doctest::Approx(1.58113883).epsilon(1e-9));
    const std::vector<double> z{0}, t{3};
    CHECK(rmse(z, t) == 3.0);
    CHECK_THROWS_AS((void)rmse(a, z), InvalidArgument);
    CHECK_THROWS_AS((void)rmse(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("mape examples") {
    const std::vector<double> a{2, 4}, b{1, 2};
    CHECK(mape(a, a) == 0.0);
    CHECK(mape(a, b) == doctest::Approx(1.0));
    try {
        (void)mape(a, std::vector<double>{1.0, 0.0});
        FAIL("expected ZeroDivisionError");
    } catch (const ZeroDivisionError& e) {
        CHECK(e.index() == 1);
    }
}

TEST_CASE("evaluate leaves mape empty on zero targets") {
    const auto r = evaluate(std::vector<double>{1, 2}, std::vector<double>{0, 2});
    CHECK(!r.mape.has_value());
    CHECK(r.n == 2);
    CHECK(r.rmse == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("rmse properties") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> p(17), t(17), q(17);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = d(rng);
            t[i] = d(rng);
            q[i] = d(rng);
        }
        CHECK(rmse(p, t) >= 0.0);
        CHECK(rmse(p, t) == doctest::Approx(rmse(t, p)));
        CHECK(rmse(p, t) == doctest::Approx(oracle::rmse(p, t)).epsilon(1e-12));
        // Triangle inequality on the error vectors.
        CHECK(rmse(p, t) <= rmse(p, q) + rmse(q, t) + 1e-12);
    }
}
