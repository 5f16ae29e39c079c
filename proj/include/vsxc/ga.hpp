#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "vsxc/series.hpp"
#include "vsxc/vmd.hpp"

namespace vsxc {

struct GaConfig {
    int pop_size = 50;
    int generations = 100;
    double crossover_p = 0.7;
    double mutation_p = 0.1;
    std::pair<double, double> alpha_bounds{1.0, 5000.0};
    std::pair<double, double> tau_bounds{0.0, 1.0};
    std::uint64_t seed = 0;
    int tournament_size = 3;
    double mutation_scale = 0.1;  ///< Gaussian sigma as a fraction of the bound width
    unsigned threads = 0;         ///< 0 = hardware concurrency

    void validate() const;
};

struct GaResult {
    double best_alpha = 0.0;
    double best_tau = 0.0;
    double best_fitness = 0.0;
    std::vector<double> history;  ///< best fitness of the initial population, then after each generation
};

/// Two real genes (alpha, tau).
struct Individual {
    double alpha = 0.0;
    double tau = 0.0;
};

using FitnessFn = std::function<double(double alpha, double tau)>;

/// Real-coded GA with tournament selection, blend crossover, Gaussian
/// mutation and single-individual elitism. `fitness` is minimised; it must be
/// pure, because a generation is evaluated concurrently.
[[nodiscard]] GaResult ga_minimize(const FitnessFn& fitness, const GaConfig& cfg);

/// VMD reconstruction MSE at (alpha, tau); +inf when the decomposition fails.
[[nodiscard]] double evaluate_fitness(const TimeSeries& series, double alpha, double tau, const VmdParams& vmd_base);

[[nodiscard]] GaResult ga_optimize(const TimeSeries& series, const GaConfig& cfg, const VmdParams& vmd_base);

namespace ga_ops {
// Exposed for property tests. All results are clamped to the bounds.
Individual random_individual(std::mt19937_64& rng, const GaConfig& cfg);
std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, std::mt19937_64& rng,
                                            const GaConfig& cfg);
Individual mutate(const Individual& x, std::mt19937_64& rng, const GaConfig& cfg);
}  // namespace ga_ops

}  // namespace vsxc
