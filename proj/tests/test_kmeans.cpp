#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vsxc/error.hpp"
#include "vsxc/kmeans.hpp"

using namespace vsxc;

namespace {

std::vector<std::vector<double>> random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (auto& p : pts)
        for (auto& v : p) v = d(rng);
    return pts;
}

double recompute_inertia(const KMeansModel& m, const std::vector<std::vector<double>>& pts) {
    double acc = 0.0;
    for (const auto& p : pts) {
        double best = INFINITY;
        for (const auto& c : m.centroids) {
            double d = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j) d += (p[j] - c[j]) * (p[j] - c[j]);
            best = std::min(best, d);
        }
        acc += best;
    }
    return acc;
}

}  // namespace

TEST_CASE("two well separated blobs") {
    auto pts = random_points(60, 24, 1);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (auto& v : pts[i]) v += i < 30 ? 100.0 : -100.0;
    const auto m = kmeans_fit(pts, 2, 7);
    for (std::size_t i = 1; i < 30; ++i) CHECK(m.labels[i] == m.labels[0]);
    for (std::size_t i = 31; i < 60; ++i) CHECK(m.labels[i] == m.labels[30]);
    CHECK(m.labels[0] != m.labels[30]);

    double scatter = 0.0;
    for (std::size_t b = 0; b < 2; ++b) {
        std::vector<double> mean(24, 0.0);
        for (std::size_t i = b * 30; i < (b + 1) * 30; ++i)
            for (std::size_t j = 0; j < 24; ++j) mean[j] += pts[i][j] / 30.0;
        for (std::size_t i = b * 30; i < (b + 1) * 30; ++i)
            for (std::size_t j = 0; j < 24; ++j) scatter += (pts[i][j] - mean[j]) * (pts[i][j] - mean[j]);
    }
    CHECK(m.inertia == doctest::Approx(scatter).epsilon(1e-10));
}

TEST_CASE("one centroid per point gives zero inertia") {
    const auto pts = random_points(12, 5, 2);
    const auto m = kmeans_fit(pts, 12, 3);
    CHECK(m.inertia == 0.0);
    std::vector<int> hits(12, 0);
    for (auto l : m.labels) ++hits[l];
    for (int h : hits) CHECK(h == 1);
}

TEST_CASE("assignment, inertia and monotone history") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto pts = random_points(200, 6, seed);
        const auto m = kmeans_fit(pts, 4, seed);
        CHECK(m.centroids.size() == 4);
        CHECK(std::abs(m.inertia - recompute_inertia(m, pts)) <= 1e-9 * std::max(1.0, m.inertia));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK(m.labels[i] == m.nearest(pts[i]));
            const double own = squared_distance(pts[i], m.centroids[m.labels[i]]);
            for (const auto& c : m.centroids) CHECK(own <= squared_distance(pts[i], c));
        }
        for (std::size_t i = 1; i < m.inertia_history.size(); ++i)
            CHECK(m.inertia_history[i] <= m.inertia_history[i - 1] + 1e-9);
    }
}

TEST_CASE("seeded determinism and errors") {
    const auto pts = random_points(80, 3, 5);
    const auto a = kmeans_fit(pts, 3, 42);
    const auto b = kmeans_fit(pts, 3, 42);
    CHECK(a.centroids == b.centroids);
    CHECK(a.labels == b.labels);
    CHECK_THROWS_AS((void)kmeans_fit(pts, 0, 1), InvalidArgument);
    CHECK_THROWS_AS((void)kmeans_fit(random_points(3, 2, 1), 4, 1), InvalidArgument);
}
