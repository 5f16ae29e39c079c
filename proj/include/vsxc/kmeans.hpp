#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vsxc {

struct KMeansModel {
    std::size_t k = 0;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;                 ///< sum of squared distances to the nearest centroid
    std::vector<std::size_t> labels;      ///< training assignment
    std::vector<double> inertia_history;  ///< inertia after each assignment step
    int iterations = 0;

    /// Index of the nearest centroid (ties go to the lower index).
    [[nodiscard]] std::size_t nearest(std::span<const double> x) const;
};

[[nodiscard]] double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing or `max_iter` is reached. Empty clusters are reseeded with the
/// point farthest from its current centroid.
[[nodiscard]] KMeansModel kmeans_fit(const std::vector<std::vector<double>>& points, std::size_t k,
                                     std::uint64_t seed, int max_iter = 300);

}  // namespace vsxc
