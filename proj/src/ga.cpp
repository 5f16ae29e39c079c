#include "vsxc/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vsxc/error.hpp"
#include "vsxc/parallel.hpp"

namespace vsxc {

void GaConfig::validate() const {
    if (pop_size < 2) throw InvalidArgument("ga: pop_size must be >= 2");
    if (generations < 0) throw InvalidArgument("ga: generations must be >= 0");
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(crossover_p) || !prob(mutation_p)) throw InvalidArgument("ga: probabilities must lie in [0, 1]");
    if (!(alpha_bounds.first < alpha_bounds.second) || !(tau_bounds.first < tau_bounds.second))
        throw InvalidArgument("ga: bounds require lo < hi");
    if (alpha_bounds.first <= 0.0) throw InvalidArgument("ga: alpha lower bound must be positive");
    if (tau_bounds.first < 0.0) throw InvalidArgument("ga: tau lower bound must be >= 0");
    if (tournament_size < 1) throw InvalidArgument("ga: tournament_size must be >= 1");
    if (!(mutation_scale > 0.0)) throw InvalidArgument("ga: mutation_scale must be positive");
}

namespace ga_ops {

namespace {
double clamp_to(double v, std::pair<double, double> b) { return std::clamp(v, b.first, b.second); }
}  // namespace

Individual random_individual(std::mt19937_64& rng, const GaConfig& cfg) {
    std::uniform_real_distribution<double> ua(cfg.alpha_bounds.first, cfg.alpha_bounds.second);
    std::uniform_real_distribution<double> ut(cfg.tau_bounds.first, cfg.tau_bounds.second);
    const double a = ua(rng);
    const double t = ut(rng);
    return {clamp_to(a, cfg.alpha_bounds), clamp_to(t, cfg.tau_bounds)};
}

std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, std::mt19937_64& rng,
                                            const GaConfig& cfg) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double wa = u(rng);
    const double wt = u(rng);
    Individual c1{wa * a.alpha + (1.0 - wa) * b.alpha, wt * a.tau + (1.0 - wt) * b.tau};
    Individual c2{(1.0 - wa) * a.alpha + wa * b.alpha, (1.0 - wt) * a.tau + wt * b.tau};
    c1 = {clamp_to(c1.alpha, cfg.alpha_bounds), clamp_to(c1.tau, cfg.tau_bounds)};
    c2 = {clamp_to(c2.alpha, cfg.alpha_bounds), clamp_to(c2.tau, cfg.tau_bounds)};
    return {c1, c2};
}

Individual mutate(const Individual& x, std::mt19937_64& rng, const GaConfig& cfg) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Individual out = x;
    const double sa = cfg.mutation_scale * (cfg.alpha_bounds.second - cfg.alpha_bounds.first);
    const double st = cfg.mutation_scale * (cfg.tau_bounds.second - cfg.tau_bounds.first);
    if (u(rng) < cfg.mutation_p) out.alpha = clamp_to(out.alpha + sa * gauss(rng), cfg.alpha_bounds);
    if (u(rng) < cfg.mutation_p) out.tau = clamp_to(out.tau + st * gauss(rng), cfg.tau_bounds);
    return out;
}

}  // namespace ga_ops

namespace {

std::vector<double> evaluate_all(const FitnessFn& fitness, const std::vector<Individual>& pop, std::size_t from,
                                 std::vector<double> scores, unsigned threads) {
    scores.resize(pop.size());
    parallel_for(
        pop.size() - from,
        [&](std::size_t j) {
            const auto& ind = pop[from + j];
            double f = std::numeric_limits<double>::infinity();
            try {
                f = fitness(ind.alpha, ind.tau);
            } catch (const Error&) {
            }
            scores[from + j] = std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
        },
        threads);
    return scores;
}

// Lowest fitness; ties go to the lowest index.
std::size_t best_index(const std::vector<double>& scores) {
    return static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
}

std::size_t tournament(const std::vector<double>& scores, std::mt19937_64& rng, int size) {
    std::uniform_int_distribution<std::size_t> pick(0, scores.size() - 1);
    std::size_t best = pick(rng);
    for (int i = 1; i < size; ++i) {
        const std::size_t c = pick(rng);
        if (scores[c] < scores[best]) best = c;
    }
    return best;
}

}  // namespace

GaResult ga_minimize(const FitnessFn& fitness, const GaConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const auto pop_size = static_cast<std::size_t>(cfg.pop_size);

    std::vector<Individual> pop;
    pop.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) pop.push_back(ga_ops::random_individual(rng, cfg));
    std::vector<double> scores = evaluate_all(fitness, pop, 0, {}, cfg.threads);

    GaResult res;
    res.history.push_back(scores[best_index(scores)]);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int gen = 0; gen < cfg.generations; ++gen) {
        const std::size_t elite = best_index(scores);
        std::vector<Individual> next{pop[elite]};
        next.reserve(pop_size);
        while (next.size() < pop_size) {
            const auto& p1 = pop[tournament(scores, rng, cfg.tournament_size)];
            const auto& p2 = pop[tournament(scores, rng, cfg.tournament_size)];
            Individual c1 = p1;
            Individual c2 = p2;
            if (u(rng) < cfg.crossover_p) std::tie(c1, c2) = ga_ops::crossover(p1, p2, rng, cfg);
            next.push_back(ga_ops::mutate(c1, rng, cfg));
            if (next.size() < pop_size) next.push_back(ga_ops::mutate(c2, rng, cfg));
        }
        // The elite keeps its score; only offspring are evaluated.
        std::vector<double> next_scores{scores[elite]};
        pop = std::move(next);
        scores = evaluate_all(fitness, pop, 1, std::move(next_scores), cfg.threads);
        res.history.push_back(scores[best_index(scores)]);
    }

    const std::size_t b = best_index(scores);
    res.best_alpha = pop[b].alpha;
    res.best_tau = pop[b].tau;
    res.best_fitness = scores[b];
    return res;
}

double evaluate_fitness(const TimeSeries& series, double alpha, double tau, const VmdParams& vmd_base) {
    VmdParams p = vmd_base;
    p.alpha = alpha;
    p.tau = tau;
    p.record_history = false;
    try {
        const double mse = vmd(series.values(), p).recon_mse;
        return std::isfinite(mse) ? mse : std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }
}

GaResult ga_optimize(const TimeSeries& series, const GaConfig& cfg, const VmdParams& vmd_base) {
    vmd_base.validate();
    return ga_minimize([&](double a, double t) { return evaluate_fitness(series, a, t, vmd_base); }, cfg);
}

}  // namespace vsxc
