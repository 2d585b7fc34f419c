#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "har/error.hpp"

namespace har {

enum class ObjectiveDirection { Maximize, Minimize };

struct ParetoPoint {
    long config_id = -1;
    std::vector<double> objectives;
};

// a dominates b iff a is no worse in every objective and strictly better in
// at least one.
inline bool dominates(std::span<const double> a, std::span<const double> b,
                      std::span<const ObjectiveDirection> directions) {
    bool better = false;
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const bool minimize = directions[i] == ObjectiveDirection::Minimize;
        const double ai = minimize ? a[i] : -a[i];
        const double bi = minimize ? b[i] : -b[i];
        if (ai > bi) return false;
        if (ai < bi) better = true;
    }
    return better;
}

// Non-dominated subset, sorted by the first objective (then the remaining
// objectives, then config id, for a stable order). Sweeps points in
// lexicographic order over an archive: once sorted, a point can only be
// dominated by points that precede it.
inline std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> results,
                                             std::span<const ObjectiveDirection> directions) {
    if (results.empty()) throw ConfigError("pareto_front: empty result set");
    const std::size_t m = directions.size();
    for (const auto& p : results)
        if (p.objectives.size() != m)
            throw ConfigError("pareto_front: objective count mismatch");

    // Orient everything toward minimization once.
    std::vector<std::vector<double>> keys(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        keys[i].resize(m);
        for (std::size_t j = 0; j < m; ++j)
            keys[i][j] = directions[j] == ObjectiveDirection::Minimize ? results[i].objectives[j]
                                                                       : -results[i].objectives[j];
    }

    std::vector<std::size_t> order(results.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return results[a].config_id < results[b].config_id;
    });

    std::vector<std::size_t> front;
    for (std::size_t idx : order) {
        bool dominated = false;
        for (std::size_t f : front) {
            bool better = false, worse = false;
            for (std::size_t j = 0; j < m; ++j) {
                if (keys[f][j] < keys[idx][j]) better = true;
                if (keys[f][j] > keys[idx][j]) worse = true;
            }
            if (better && !worse) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(idx);
    }

    std::vector<ParetoPoint> out;
    out.reserve(front.size());
    for (std::size_t idx : front) out.push_back(results[idx]);
    std::sort(out.begin(), out.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.objectives != b.objectives) return a.objectives < b.objectives;
        return a.config_id < b.config_id;
    });
    return out;
}

} // namespace har
