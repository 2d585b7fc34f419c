#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace har {

// The twelve protocol activities, indexed in canonical (alphabetical) order.
// This order is the tie-break order for classification and the column order
// of every per-activity report.
enum class Activity : int {
    AscendingStairs = 0,
    Cycling,
    DescendingStairs,
    Ironing,
    Lying,
    NordicWalking,
    RopeJumping,
    Running,
    Sitting,
    Standing,
    VacuumCleaning,
    Walking,
};

inline constexpr std::size_t kActivityCount = 12;
inline constexpr int kTransientActivityId = 0;

inline constexpr std::size_t activity_index(Activity a) {
    return static_cast<std::size_t>(a);
}

inline constexpr std::array<std::string_view, kActivityCount> kActivityNames = {
    "ascending_stairs", "cycling",  "descending_stairs", "ironing",
    "lying",            "nordic_walking", "rope_jumping", "running",
    "sitting",          "standing", "vacuum_cleaning",   "walking",
};

// Numeric activity ids used by the recording files.
inline constexpr std::array<int, kActivityCount> kActivityFileIds = {
    12, 6, 13, 17, 1, 7, 24, 5, 2, 3, 16, 4,
};

inline std::string_view activity_name(Activity a) {
    return kActivityNames[activity_index(a)];
}

// Short code ("A1".."A12") used in compact report columns.
inline std::string activity_code(Activity a) {
    return "A" + std::to_string(activity_index(a) + 1);
}

inline std::optional<Activity> activity_from_file_id(int id) {
    for (std::size_t i = 0; i < kActivityCount; ++i)
        if (kActivityFileIds[i] == id) return static_cast<Activity>(i);
    return std::nullopt;
}

inline int activity_file_id(Activity a) {
    return kActivityFileIds[activity_index(a)];
}

inline std::optional<Activity> activity_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kActivityCount; ++i)
        if (kActivityNames[i] == name) return static_cast<Activity>(i);
    return std::nullopt;
}

} // namespace har
