#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "har/error.hpp"

namespace har {

inline constexpr std::size_t kHyperAxisCount = 4;
inline constexpr std::array<std::string_view, kHyperAxisCount> kHyperAxisNames = {
    "window_size", "overlap", "distance", "k"};

// Pairs of axes in fixed order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
inline constexpr std::array<std::array<std::size_t, 2>, 6> kHyperAxisPairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// A metric evaluated on a full Cartesian sub-grid of the four hyperparameters.
// values are indexed window-size major: ((iw*No + io)*Nd + id)*Nk + ik.
struct HyperGridMetric {
    std::array<std::size_t, kHyperAxisCount> shape{};
    std::vector<double> values;

    std::size_t cells() const { return shape[0] * shape[1] * shape[2] * shape[3]; }
    std::size_t index(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) const {
        return ((i0 * shape[1] + i1) * shape[2] + i2) * shape[3] + i3;
    }
};

// Variance decomposition of one metric: per-axis main effect shares, pairwise
// interaction shares, and the higher-order residual. main + pairwise +
// residual sums to 1.
struct ImportanceReport {
    double total_variance = 0.0;
    std::array<double, kHyperAxisCount> main_share{};
    std::array<double, kHyperAxisPairs.size()> pair_share{};
    double residual_share = 0.0;
};

// Exact functional ANOVA on the grid under the uniform measure: the main
// effect of an axis is the variance of its marginal means, a pairwise effect
// is the variance of the doubly-centered 2-D marginal means.
inline ImportanceReport hyperparameter_importance(const HyperGridMetric& grid) {
    const std::size_t n = grid.cells();
    if (n == 0 || grid.values.size() != n)
        throw ConfigError("importance: grid values do not match the declared shape");

    double mean = 0.0;
    for (double v : grid.values) mean += v;
    mean /= static_cast<double>(n);

    double total = 0.0;
    for (double v : grid.values) total += (v - mean) * (v - mean);
    total /= static_cast<double>(n);
    if (total <= 1e-20 * (1.0 + mean * mean))
        throw ConfigError("importance: constant metric, nothing to decompose");

    // Marginal means per axis.
    std::array<std::vector<double>, kHyperAxisCount> marginal;
    for (std::size_t a = 0; a < kHyperAxisCount; ++a)
        marginal[a].assign(grid.shape[a], 0.0);
    for (std::size_t i0 = 0; i0 < grid.shape[0]; ++i0)
        for (std::size_t i1 = 0; i1 < grid.shape[1]; ++i1)
            for (std::size_t i2 = 0; i2 < grid.shape[2]; ++i2)
                for (std::size_t i3 = 0; i3 < grid.shape[3]; ++i3) {
                    const double v = grid.values[grid.index(i0, i1, i2, i3)];
                    marginal[0][i0] += v;
                    marginal[1][i1] += v;
                    marginal[2][i2] += v;
                    marginal[3][i3] += v;
                }
    for (std::size_t a = 0; a < kHyperAxisCount; ++a) {
        const double cells_per_value = static_cast<double>(n) / static_cast<double>(grid.shape[a]);
        for (double& m : marginal[a]) m /= cells_per_value;
    }

    ImportanceReport report;
    report.total_variance = total;
    for (std::size_t a = 0; a < kHyperAxisCount; ++a) {
        double var = 0.0;
        for (double m : marginal[a]) var += (m - mean) * (m - mean);
        var /= static_cast<double>(grid.shape[a]);
        report.main_share[a] = var / total;
    }

    for (std::size_t pi = 0; pi < kHyperAxisPairs.size(); ++pi) {
        const std::size_t a = kHyperAxisPairs[pi][0];
        const std::size_t b = kHyperAxisPairs[pi][1];
        const std::size_t na = grid.shape[a], nb = grid.shape[b];
        std::vector<double> pair_mean(na * nb, 0.0);
        for (std::size_t i0 = 0; i0 < grid.shape[0]; ++i0)
            for (std::size_t i1 = 0; i1 < grid.shape[1]; ++i1)
                for (std::size_t i2 = 0; i2 < grid.shape[2]; ++i2)
                    for (std::size_t i3 = 0; i3 < grid.shape[3]; ++i3) {
                        const std::array<std::size_t, 4> idx = {i0, i1, i2, i3};
                        pair_mean[idx[a] * nb + idx[b]] +=
                            grid.values[grid.index(i0, i1, i2, i3)];
                    }
        const double cells_per_pair = static_cast<double>(n) / static_cast<double>(na * nb);
        double var = 0.0;
        for (std::size_t u = 0; u < na; ++u)
            for (std::size_t v = 0; v < nb; ++v) {
                const double m = pair_mean[u * nb + v] / cells_per_pair;
                // Doubly centered contrast keeps the effect nonnegative.
                const double effect = m - marginal[a][u] - marginal[b][v] + mean;
                var += effect * effect;
            }
        var /= static_cast<double>(na * nb);
        report.pair_share[pi] = var / total;
    }

    double accounted = 0.0;
    for (double s : report.main_share) accounted += s;
    for (double s : report.pair_share) accounted += s;
    report.residual_share = 1.0 - accounted;
    return report;
}

} // namespace har
