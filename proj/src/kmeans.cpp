#include "vsxc/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "vsxc/error.hpp"

namespace vsxc {

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

std::size_t KMeansModel::nearest(std::span<const double> x) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(x, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

namespace {

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::vector<std::vector<double>> plus_plus_init(const std::vector<std::vector<double>>& pts, std::size_t k,
                                                std::mt19937_64& rng) {
    const std::size_t n = pts.size();
    std::vector<std::vector<double>> centers;
    centers.push_back(pts[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(pts[i], centers[0]);
    while (centers.size() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total > 0.0) {
            const double r = uniform01(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > r && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining points coincide with a centre; take any unused index.
            pick = centers.size() % n;
        }
        centers.push_back(pts[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(pts[i], centers.back()));
    }
    return centers;
}

}  // namespace

KMeansModel kmeans_fit(const std::vector<std::vector<double>>& pts, std::size_t k, std::uint64_t seed, int max_iter) {
    if (k == 0) throw InvalidArgument("kmeans: k must be >= 1");
    if (pts.size() < k)
        throw InvalidArgument("kmeans: " + std::to_string(pts.size()) + " points is fewer than k = " + std::to_string(k));
    const std::size_t dim = pts[0].size();
    for (const auto& p : pts)
        if (p.size() != dim) throw InvalidArgument("kmeans: points differ in dimension");

    std::mt19937_64 rng(seed);
    KMeansModel m;
    m.k = k;
    m.centroids = plus_plus_init(pts, k, rng);
    const std::size_t n = pts.size();
    std::vector<std::size_t> labels(n, k);
    std::vector<double> dist(n);

    auto assign = [&] {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = m.nearest(pts[i]);
            if (c != labels[i]) changed = true;
            labels[i] = c;
            dist[i] = squared_distance(pts[i], m.centroids[c]);
            inertia += dist[i];
        }
        m.inertia_history.push_back(inertia);
        m.inertia = inertia;
        return changed;
    };

    bool changed = assign();
    while (changed && m.iterations < max_iter) {
        ++m.iterations;
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[labels[i]];
            for (std::size_t d = 0; d < dim; ++d) sums[labels[i]][d] += pts[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
                m.centroids[c] = pts[far];
                dist[far] = 0.0;
                continue;
            }
            for (std::size_t d = 0; d < dim; ++d) m.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
        changed = assign();
    }
    m.labels = std::move(labels);
    return m;
}

}  // namespace vsxc
