#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "har/activity.hpp"

namespace har {

enum class Placement : int { Wrist = 0, Chest, Ankle };
enum class SensorKind : int { Accelerometer = 0, Gyroscope, Magnetometer };

inline constexpr std::size_t kPlacementCount = 3;
inline constexpr std::size_t kSensorCount = 3;
inline constexpr std::size_t kAxisCount = 3;
inline constexpr std::size_t kChannelCount = kPlacementCount * kSensorCount * kAxisCount; // 27

inline constexpr std::array<std::string_view, kPlacementCount> kPlacementNames = {"wrist", "chest", "ankle"};
inline constexpr std::array<std::string_view, kSensorCount> kSensorNames = {"acc", "gyro", "mag"};
inline constexpr std::array<std::string_view, kAxisCount> kAxisNames = {"x", "y", "z"};

inline constexpr std::size_t channel_index(Placement p, SensorKind s, std::size_t axis) {
    return static_cast<std::size_t>(p) * kSensorCount * kAxisCount +
           static_cast<std::size_t>(s) * kAxisCount + axis;
}

inline std::string channel_name(std::size_t channel) {
    const std::size_t p = channel / (kSensorCount * kAxisCount);
    const std::size_t s = (channel / kAxisCount) % kSensorCount;
    const std::size_t a = channel % kAxisCount;
    return std::string(kPlacementNames[p]) + "_" + std::string(kSensorNames[s]) + "_" +
           std::string(kAxisNames[a]);
}

// One user's time-aligned recording. Immutable once built; shared read-only
// across evaluation workers.
struct SensorSession {
    int user_id = 0;
    double frequency_hz = 100.0;
    std::vector<double> timestamps;              // seconds, monotone increasing
    std::vector<Activity> labels;                // per sample
    std::array<std::vector<double>, kChannelCount> channels;

    std::size_t size() const { return labels.size(); }

    std::span<const double> channel(std::size_t c, std::size_t start, std::size_t count) const {
        return std::span<const double>(channels[c]).subspan(start, count);
    }
};

} // namespace har
