#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "har/error.hpp"
#include "har/session.hpp"
#include "har/util.hpp"

namespace har {

// Fixed-size sliding window: `size` samples advancing by
// floor(size * (1 - overlap)) samples, clamped to at least 1.
struct WindowSpec {
    std::size_t size = 0;
    double overlap = 0.0;

    // Small guard so grid overlaps like 0.3 hit their exact integer step.
    std::size_t raw_step() const {
        return static_cast<std::size_t>(
            std::floor(static_cast<double>(size) * (1.0 - overlap) + 1e-9));
    }
    std::size_t step() const { return std::max<std::size_t>(1, raw_step()); }
};

// Start indices of all windows fitting in a run of `run_length` samples.
inline std::vector<std::size_t> window_plan(std::size_t run_length, const WindowSpec& spec) {
    std::vector<std::size_t> starts;
    if (spec.size == 0 || run_length < spec.size) return starts;
    const std::size_t step = spec.step();
    starts.reserve((run_length - spec.size) / step + 1);
    for (std::size_t s = 0; s + spec.size <= run_length; s += step) starts.push_back(s);
    return starts;
}

// A window is a borrowed view into one session; the session must outlive it.
struct Window {
    const SensorSession* session = nullptr;
    std::size_t start = 0;
    std::size_t size = 0;
    Activity activity = Activity::Lying;
    int user_id = 0;

    std::span<const double> channel(std::size_t c) const {
        return session->channel(c, start, size);
    }
};

// Windows per contiguous same-activity run per session; windows never
// straddle an activity boundary.
inline std::vector<Window> segment(std::span<const SensorSession* const> sessions,
                                   const WindowSpec& spec) {
    std::vector<Window> windows;
    for (const SensorSession* session : sessions) {
        const std::size_t n = session->size();
        std::size_t run_start = 0;
        while (run_start < n) {
            std::size_t run_end = run_start + 1;
            while (run_end < n && session->labels[run_end] == session->labels[run_start]) ++run_end;
            for (std::size_t s : window_plan(run_end - run_start, spec))
                windows.push_back(Window{session, run_start + s, spec.size,
                                         session->labels[run_start], session->user_id});
            run_start = run_end;
        }
    }
    return windows;
}

inline std::vector<Window> segment(const SensorSession& session, const WindowSpec& spec) {
    const SensorSession* p = &session;
    return segment(std::span<const SensorSession* const>(&p, 1), spec);
}

inline std::vector<Window> segment(std::span<const SensorSession> sessions,
                                   const WindowSpec& spec) {
    std::vector<const SensorSession*> ptrs;
    ptrs.reserve(sessions.size());
    for (const auto& s : sessions) ptrs.push_back(&s);
    return segment(std::span<const SensorSession* const>(ptrs), spec);
}

using ActivityDistribution = std::array<double, kActivityCount>;

inline ActivityDistribution label_distribution(std::span<const Activity> labels) {
    ActivityDistribution dist{};
    for (Activity a : labels) dist[activity_index(a)] += 1.0;
    const double total = static_cast<double>(labels.size());
    if (total > 0)
        for (double& d : dist) d /= total;
    return dist;
}

// Reduces `windows` to min(target_count, |windows|) windows whose activity
// mix follows `reference` by largest-remainder apportionment. Candidates are
// sorted canonically (user, activity, start) before the seeded draw, so the
// result does not depend on the input order.
inline std::vector<Window> cap_instances(std::span<const Window> windows,
                                         std::size_t target_count,
                                         const ActivityDistribution& reference,
                                         std::uint64_t seed) {
    std::vector<Window> sorted(windows.begin(), windows.end());
    std::sort(sorted.begin(), sorted.end(), [](const Window& a, const Window& b) {
        if (a.user_id != b.user_id) return a.user_id < b.user_id;
        if (a.activity != b.activity) return a.activity < b.activity;
        return a.start < b.start;
    });
    if (target_count >= sorted.size()) return sorted;

    double ref_total = 0.0;
    for (double p : reference) {
        if (p < 0.0) throw ConfigError("reference distribution has a negative share");
        ref_total += p;
    }
    if (std::abs(ref_total - 1.0) > 1e-6)
        throw ConfigError("reference distribution must sum to 1");

    std::array<std::vector<std::size_t>, kActivityCount> by_activity;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        by_activity[activity_index(sorted[i].activity)].push_back(i);

    std::size_t present = 0;
    for (const auto& g : by_activity) present += g.empty() ? 0 : 1;
    if (target_count < present)
        throw ConfigError("target_count " + std::to_string(target_count) +
                          " is below the number of activities present (" +
                          std::to_string(present) + ")");

    for (std::size_t a = 0; a < kActivityCount; ++a)
        if (reference[a] > 1e-12 && by_activity[a].empty())
            throw ConfigError("activity " + std::string(kActivityNames[a]) +
                              " required by the reference distribution has no windows");

    // Largest-remainder apportionment of target_count * share.
    std::array<std::size_t, kActivityCount> take{};
    std::array<double, kActivityCount> fraction{};
    std::size_t assigned = 0;
    for (std::size_t a = 0; a < kActivityCount; ++a) {
        const double quota = static_cast<double>(target_count) * reference[a] / ref_total;
        take[a] = static_cast<std::size_t>(std::floor(quota));
        fraction[a] = quota - std::floor(quota);
        assigned += take[a];
    }
    std::array<std::size_t, kActivityCount> order{};
    for (std::size_t a = 0; a < kActivityCount; ++a) order[a] = a;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fraction[a] > fraction[b]; });
    for (std::size_t i = 0; i < order.size() && assigned < target_count; ++i) {
        ++take[order[i]];
        ++assigned;
    }

    // An activity may not have enough windows for its quota; hand the deficit
    // to activities with spare capacity, largest remainder first.
    std::size_t deficit = 0;
    for (std::size_t a = 0; a < kActivityCount; ++a) {
        if (take[a] > by_activity[a].size()) {
            deficit += take[a] - by_activity[a].size();
            take[a] = by_activity[a].size();
        }
    }
    while (deficit > 0) {
        bool moved = false;
        for (std::size_t i = 0; i < order.size() && deficit > 0; ++i) {
            const std::size_t a = order[i];
            if (take[a] < by_activity[a].size()) {
                ++take[a];
                --deficit;
                moved = true;
            }
        }
        if (!moved) break; // everything exhausted; only possible if target > |windows|
    }

    // Uniform draw without replacement within each activity, one RNG stream
    // per activity so absent activities do not shift the others.
    std::vector<Window> result;
    result.reserve(target_count);
    for (std::size_t a = 0; a < kActivityCount; ++a) {
        auto& pool = by_activity[a];
        const std::size_t want = take[a];
        if (want == 0) continue;
        std::mt19937_64 rng(derive_seed(seed, a));
        for (std::size_t i = 0; i < want; ++i) { // partial Fisher-Yates
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
        for (std::size_t i = 0; i < want; ++i) result.push_back(sorted[pool[i]]);
    }
    return result;
}

} // namespace har
