#pragma once

#include <chrono>
#include <cstddef>
#include <functional>

#include "har/error.hpp"

namespace har {

// Energy source abstraction: the default model is constant average power, a
// hardware-backed meter can substitute behind the same interface.
class PowerMeter {
public:
    virtual ~PowerMeter() = default;
    virtual double energy_mj(double response_ms) const = 0;
};

class ConstantPowerMeter : public PowerMeter {
public:
    explicit ConstantPowerMeter(double watts) : watts_(watts) {
        if (watts <= 0.0) throw ConfigError("power must be positive, got " + std::to_string(watts));
    }
    // W * ms = mJ
    double energy_mj(double response_ms) const override { return watts_ * response_ms; }
    double watts() const { return watts_; }

private:
    double watts_;
};

inline double estimate_energy(double mean_response_ms, const PowerMeter& meter) {
    return meter.energy_mj(mean_response_ms);
}

// Per-inference wall-clock accounting over the three pipeline stages:
// reading data, feature extraction, inference.
struct ResponseStats {
    double mean_total_ms = 0.0;
    double mean_read_ms = 0.0;
    double mean_extract_ms = 0.0;
    double mean_infer_ms = 0.0;
    std::size_t inferences = 0;
    std::size_t measured = 0; // inferences after warm-up exclusion
    std::size_t warmup = 0;
};

// Runs the three stages for each item on a monotonic clock. The first
// `warmup` items run but are excluded from the means (unless that would
// leave nothing to measure). `prepare`, when given, runs before each item
// outside the measurement, for work the harness owes the pipeline but a
// deployed system would not do (e.g. staging raw bytes).
inline ResponseStats measure_response(std::size_t items, std::size_t warmup,
                                      const std::function<void(std::size_t)>& read_stage,
                                      const std::function<void(std::size_t)>& extract_stage,
                                      const std::function<void(std::size_t)>& infer_stage,
                                      const std::function<void(std::size_t)>& prepare = {}) {
    if (items == 0) throw ConfigError("measure_response: need at least one inference");
    using clock = std::chrono::steady_clock;

    ResponseStats stats;
    stats.inferences = items;
    stats.warmup = items > warmup ? warmup : 0;

    double read_ms = 0.0, extract_ms = 0.0, infer_ms = 0.0;
    for (std::size_t i = 0; i < items; ++i) {
        if (prepare) prepare(i);
        const auto t0 = clock::now();
        read_stage(i);
        const auto t1 = clock::now();
        extract_stage(i);
        const auto t2 = clock::now();
        infer_stage(i);
        const auto t3 = clock::now();
        if (i < stats.warmup) continue;
        read_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
        extract_ms += std::chrono::duration<double, std::milli>(t2 - t1).count();
        infer_ms += std::chrono::duration<double, std::milli>(t3 - t2).count();
    }
    stats.measured = items - stats.warmup;
    const double dn = static_cast<double>(stats.measured);
    stats.mean_read_ms = read_ms / dn;
    stats.mean_extract_ms = extract_ms / dn;
    stats.mean_infer_ms = infer_ms / dn;
    stats.mean_total_ms = stats.mean_read_ms + stats.mean_extract_ms + stats.mean_infer_ms;
    return stats;
}

} // namespace har
