#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "har/evaluation.hpp"
#include "har/pareto.hpp"
#include "har/util.hpp"

namespace har {

// Discrete hyperparameter grid. The default is the full exploration space:
// 10 x 3 x 18 x 10 = 5400 configurations.
struct SearchSpace {
    std::vector<int> window_sizes;
    std::vector<double> overlaps;
    std::vector<Distance> distances;
    std::vector<int> ks;

    static SearchSpace full_grid() {
        SearchSpace s;
        for (int w = 50; w <= 900; w += 50) s.window_sizes.push_back(w);
        for (int o = 0; o <= 9; ++o) s.overlaps.push_back(o / 10.0);
        s.distances = {Distance::Euclidean, Distance::Manhattan, Distance::Chebyshev};
        for (int k = 1; k <= 10; ++k) s.ks.push_back(k);
        return s;
    }

    std::size_t size() const {
        return window_sizes.size() * overlaps.size() * distances.size() * ks.size();
    }

    // Canonical flat id: window size major, then overlap, distance, k.
    long config_id(std::size_t iw, std::size_t io, std::size_t id, std::size_t ik) const {
        return static_cast<long>(((iw * overlaps.size() + io) * distances.size() + id) * ks.size() +
                                 ik);
    }

    Configuration at(std::size_t iw, std::size_t io, std::size_t id, std::size_t ik,
                     double train_hz = 100.0, double test_hz = 100.0) const {
        Configuration c;
        c.window_size = window_sizes[iw];
        c.overlap = overlaps[io];
        c.distance = distances[id];
        c.k = ks[ik];
        c.train_hz = train_hz;
        c.test_hz = test_hz;
        c.config_id = config_id(iw, io, id, ik);
        return c;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (int w : window_sizes) h = fnv1a64_value(w, h);
        for (double o : overlaps) h = fnv1a64_value(o, h);
        for (Distance d : distances) h = fnv1a64_value(static_cast<int>(d), h);
        for (int k : ks) h = fnv1a64_value(k, h);
        return h;
    }
};

inline std::vector<Configuration> enumerate_grid(const SearchSpace& space, double train_hz = 100.0,
                                                 double test_hz = 100.0) {
    std::vector<Configuration> grid;
    grid.reserve(space.size());
    for (std::size_t iw = 0; iw < space.window_sizes.size(); ++iw)
        for (std::size_t io = 0; io < space.overlaps.size(); ++io)
            for (std::size_t id = 0; id < space.distances.size(); ++id)
                for (std::size_t ik = 0; ik < space.ks.size(); ++ik)
                    grid.push_back(space.at(iw, io, id, ik, train_hz, test_hz));
    return grid;
}

// Finds the canonical id of a configuration when it lies on the space.
inline std::optional<long> config_id_in(const SearchSpace& space, const Configuration& c) {
    const auto find = [](const auto& values, const auto& v) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] == v) return i;
        return std::nullopt;
    };
    const auto iw = find(space.window_sizes, c.window_size);
    const auto id = find(space.distances, c.distance);
    const auto ik = find(space.ks, c.k);
    std::optional<std::size_t> io;
    for (std::size_t i = 0; i < space.overlaps.size(); ++i)
        if (std::abs(space.overlaps[i] - c.overlap) < 1e-9) io = i;
    if (!iw || !io || !id || !ik) return std::nullopt;
    return space.config_id(*iw, *io, *id, *ik);
}

struct EvaluatedConfig {
    Configuration config;
    std::vector<double> objectives;
};

// Returns the objective vector, or nullopt for a failed trial.
using SearchEvaluator =
    std::function<std::optional<std::vector<double>>(const Configuration&)>;

struct Nsga2Params {
    double crossover_rate = 0.9;
    double mutation_rate = 0.25; // 1 / number of genes
    // Optional warm start; genomes are (iw, io, id, ik) indices into the space.
    std::vector<std::array<std::size_t, 4>> seed_genomes;
};

namespace detail {

using Genome = std::array<std::size_t, 4>;

struct Nsga2Individual {
    Genome genome{};
    std::vector<double> minimized; // objectives oriented toward minimization
    std::size_t rank = 0;
    double crowding = 0.0;
};

inline std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    std::vector<Nsga2Individual>& pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);

    const auto dom = [&](std::size_t a, std::size_t b) {
        bool better = false;
        for (std::size_t j = 0; j < pop[a].minimized.size(); ++j) {
            if (pop[a].minimized[j] > pop[b].minimized[j]) return false;
            if (pop[a].minimized[j] < pop[b].minimized[j]) better = true;
        }
        return better;
    };

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dom(p, q))
                dominated[p].push_back(q);
            else if (dom(q, p))
                ++domination_count[p];
        }
        if (domination_count[p] == 0) {
            pop[p].rank = 0;
            fronts[0].push_back(p);
        }
    }
    std::size_t i = 0;
    while (!fronts[i].empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts[i]) {
            for (std::size_t q : dominated[p]) {
                if (--domination_count[q] == 0) {
                    pop[q].rank = i + 1;
                    next.push_back(q);
                }
            }
        }
        ++i;
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

inline void assign_crowding(std::vector<Nsga2Individual>& pop,
                            const std::vector<std::size_t>& front) {
    for (std::size_t idx : front) pop[idx].crowding = 0.0;
    if (front.size() < 3) {
        for (std::size_t idx : front) pop[idx].crowding = std::numeric_limits<double>::infinity();
        return;
    }
    const std::size_t m = pop[front[0]].minimized.size();
    std::vector<std::size_t> order(front);
    for (std::size_t j = 0; j < m; ++j) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return pop[a].minimized[j] < pop[b].minimized[j];
        });
        const double lo = pop[order.front()].minimized[j];
        const double hi = pop[order.back()].minimized[j];
        pop[order.front()].crowding = std::numeric_limits<double>::infinity();
        pop[order.back()].crowding = std::numeric_limits<double>::infinity();
        if (hi == lo) continue;
        for (std::size_t r = 1; r + 1 < order.size(); ++r)
            pop[order[r]].crowding +=
                (pop[order[r + 1]].minimized[j] - pop[order[r - 1]].minimized[j]) / (hi - lo);
    }
}

// Crowded-comparison: lower rank first, larger crowding second.
inline bool crowded_less(const Nsga2Individual& a, const Nsga2Individual& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowding > b.crowding;
}

} // namespace detail

// NSGA-II over the discrete grid. A trial is one proposed genome; proposals
// already seen are served from a cache, so `trials` proposals typically yield
// fewer distinct evaluations. Randomness is drawn from per-generation streams
// derived from (seed, generation). Returns every distinct configuration that
// evaluated successfully.
inline std::vector<EvaluatedConfig> nsga2_search(
    const SearchSpace& space, const SearchEvaluator& evaluator, std::size_t trials,
    std::size_t population, std::uint64_t seed,
    std::vector<ObjectiveDirection> directions = {ObjectiveDirection::Maximize,
                                                  ObjectiveDirection::Minimize},
    const Nsga2Params& params = {}) {
    if (population < 4) throw ConfigError("nsga2: population must be at least 4");
    if (trials < population) throw ConfigError("nsga2: trials must be at least the population");
    if (space.size() == 0) throw ConfigError("nsga2: empty search space");

    using detail::Genome;
    using detail::Nsga2Individual;

    const std::array<std::size_t, 4> axis_sizes = {space.window_sizes.size(),
                                                   space.overlaps.size(), space.distances.size(),
                                                   space.ks.size()};

    // nullopt marks a failed trial so it is not retried.
    std::map<Genome, std::optional<std::vector<double>>> cache;
    std::size_t proposals = 0;

    const auto orient = [&](const std::vector<double>& objs) {
        std::vector<double> keys(objs.size());
        for (std::size_t j = 0; j < objs.size(); ++j)
            keys[j] = directions[j] == ObjectiveDirection::Minimize ? objs[j] : -objs[j];
        return keys;
    };

    const auto propose = [&](const Genome& g) -> const std::optional<std::vector<double>>& {
        ++proposals;
        auto it = cache.find(g);
        if (it != cache.end()) return it->second;
        std::optional<std::vector<double>> objs;
        try {
            objs = evaluator(space.at(g[0], g[1], g[2], g[3]));
        } catch (const Error&) {
            objs = std::nullopt;
        }
        if (objs && objs->size() != directions.size())
            throw ConfigError("nsga2: evaluator returned wrong objective count");
        return cache.emplace(g, std::move(objs)).first->second;
    };

    std::vector<Nsga2Individual> pop;
    pop.reserve(population);

    std::mt19937_64 rng0(derive_seed(seed, 0));
    const auto random_genome = [&](std::mt19937_64& rng) {
        Genome g;
        for (std::size_t a = 0; a < 4; ++a) {
            std::uniform_int_distribution<std::size_t> pick(0, axis_sizes[a] - 1);
            g[a] = pick(rng);
        }
        return g;
    };

    for (const Genome& g : params.seed_genomes) {
        if (pop.size() >= population || proposals >= trials) break;
        const auto& objs = propose(g);
        if (objs) pop.push_back({g, orient(*objs)});
    }
    while (pop.size() < population && proposals < trials) {
        const Genome g = random_genome(rng0);
        const auto& objs = propose(g);
        if (objs) pop.push_back({g, orient(*objs)});
    }

    for (std::uint64_t generation = 1; proposals < trials && !pop.empty(); ++generation) {
        auto fronts = detail::fast_nondominated_sort(pop);
        for (const auto& f : fronts) detail::assign_crowding(pop, f);

        std::mt19937_64 rng(derive_seed(seed, generation));
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        std::uniform_real_distribution<double> coin(0.0, 1.0);

        const auto tournament = [&]() -> const Nsga2Individual& {
            const auto& a = pop[pick(rng)];
            const auto& b = pop[pick(rng)];
            return detail::crowded_less(a, b) ? a : b;
        };

        std::vector<Nsga2Individual> offspring;
        offspring.reserve(population);
        while (offspring.size() < population && proposals < trials) {
            const Nsga2Individual& p1 = tournament();
            const Nsga2Individual& p2 = tournament();
            Genome child = p1.genome;
            if (coin(rng) < params.crossover_rate)
                for (std::size_t a = 0; a < 4; ++a)
                    if (coin(rng) < 0.5) child[a] = p2.genome[a];
            for (std::size_t a = 0; a < 4; ++a) {
                if (coin(rng) < params.mutation_rate) {
                    std::uniform_int_distribution<std::size_t> reset(0, axis_sizes[a] - 1);
                    child[a] = reset(rng);
                }
            }
            const auto& objs = propose(child);
            if (objs) offspring.push_back({child, orient(*objs)});
        }

        // Elitist truncation of parents + offspring.
        pop.insert(pop.end(), offspring.begin(), offspring.end());
        auto combined_fronts = detail::fast_nondominated_sort(pop);
        for (const auto& f : combined_fronts) detail::assign_crowding(pop, f);

        std::vector<Nsga2Individual> next;
        next.reserve(population);
        for (const auto& front : combined_fronts) {
            if (next.size() + front.size() <= population) {
                for (std::size_t idx : front) next.push_back(pop[idx]);
            } else {
                std::vector<std::size_t> rest(front);
                std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
                    return pop[a].crowding > pop[b].crowding;
                });
                for (std::size_t idx : rest) {
                    if (next.size() >= population) break;
                    next.push_back(pop[idx]);
                }
            }
            if (next.size() >= population) break;
        }
        pop = std::move(next);
    }

    std::vector<EvaluatedConfig> evaluated;
    evaluated.reserve(cache.size());
    for (const auto& [genome, objs] : cache) {
        if (!objs) continue;
        evaluated.push_back({space.at(genome[0], genome[1], genome[2], genome[3]), *objs});
    }
    std::sort(evaluated.begin(), evaluated.end(),
              [](const EvaluatedConfig& a, const EvaluatedConfig& b) {
                  return a.config.config_id < b.config.config_id;
              });
    return evaluated;
}

} // namespace har
