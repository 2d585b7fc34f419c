#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "har/error.hpp"
#include "har/segmentation.hpp"
#include "har/session.hpp"
#include "har/util.hpp"

namespace har {

inline constexpr std::size_t kFeaturesPerSensor = 10;
inline constexpr std::size_t kFeatureCount =
    kPlacementCount * kSensorCount * kFeaturesPerSensor; // 90

struct FeatureVector {
    std::array<double, kFeatureCount> values{};
    Activity label = Activity::Lying;
    int user_id = 0;
};

inline const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = [] {
        constexpr std::array<std::string_view, kFeaturesPerSensor> parts = {
            "mean_x", "mean_y", "mean_z", "mean_xyz", "std_x",
            "std_y",  "std_z",  "corr_xy", "corr_xz", "corr_yz",
        };
        std::array<std::string, kFeatureCount> out;
        std::size_t i = 0;
        for (std::size_t p = 0; p < kPlacementCount; ++p)
            for (std::size_t s = 0; s < kSensorCount; ++s)
                for (const auto part : parts)
                    out[i++] = std::string(kPlacementNames[p]) + "_" +
                               std::string(kSensorNames[s]) + "_" + std::string(part);
        return out;
    }();
    return names;
}

namespace detail {

// Pearson correlation from centered sums; 0 when either axis is constant.
inline double centered_corr(std::span<const double> x, std::span<const double> y,
                            double mx, double my) {
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace detail

// Ten statistics for one 3-axis sensor, written into out[0..9]:
// per-axis means, mean of the axis sum, per-axis sample standard deviations
// (n-1 denominator), and the three pairwise axis correlations.
inline void sensor_features(std::span<const double> x, std::span<const double> y,
                            std::span<const double> z, std::span<double> out) {
    const std::size_t n = x.size();
    if (n < 2) throw ConfigError("window must contain at least 2 samples");

    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sz += z[i];
    }
    const double dn = static_cast<double>(n);
    const double mx = sx / dn, my = sy / dn, mz = sz / dn;
    out[0] = mx;
    out[1] = my;
    out[2] = mz;
    out[3] = (sx + sy + sz) / dn;

    double vx = 0.0, vy = 0.0, vz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
        vz += (z[i] - mz) * (z[i] - mz);
    }
    out[4] = std::sqrt(vx / (dn - 1.0));
    out[5] = std::sqrt(vy / (dn - 1.0));
    out[6] = std::sqrt(vz / (dn - 1.0));
    out[7] = detail::centered_corr(x, y, mx, my);
    out[8] = detail::centered_corr(x, z, mx, mz);
    out[9] = detail::centered_corr(y, z, my, mz);
}

// 90 features from 27 channel slices, placement-major, sensor-minor.
inline FeatureVector extract_features(const std::array<std::span<const double>, kChannelCount>& ch,
                                      Activity label, int user_id) {
    FeatureVector fv;
    fv.label = label;
    fv.user_id = user_id;
    std::size_t out = 0;
    for (std::size_t p = 0; p < kPlacementCount; ++p) {
        for (std::size_t s = 0; s < kSensorCount; ++s) {
            const std::size_t c = channel_index(static_cast<Placement>(p),
                                                static_cast<SensorKind>(s), 0);
            sensor_features(ch[c], ch[c + 1], ch[c + 2],
                            std::span<double>(fv.values).subspan(out, kFeaturesPerSensor));
            out += kFeaturesPerSensor;
        }
    }
    return fv;
}

inline FeatureVector extract_features(const Window& w) {
    std::array<std::span<const double>, kChannelCount> ch;
    for (std::size_t c = 0; c < kChannelCount; ++c) ch[c] = w.channel(c);
    return extract_features(ch, w.activity, w.user_id);
}

// Per-dimension (min, max) fitted on the training split only.
struct Normalizer {
    std::array<double, kFeatureCount> min{};
    std::array<double, kFeatureCount> max{};
};

inline Normalizer fit_normalizer(std::span<const FeatureVector> train) {
    if (train.empty()) throw ConfigError("cannot fit a normalizer on an empty training set");
    Normalizer norm;
    norm.min = train[0].values;
    norm.max = train[0].values;
    for (const auto& fv : train.subspan(1)) {
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            norm.min[d] = std::min(norm.min[d], fv.values[d]);
            norm.max[d] = std::max(norm.max[d], fv.values[d]);
        }
    }
    return norm;
}

// (v - min) / (max - min), clamped to [0, 1]; degenerate dimensions map to 0.
inline void normalize_in_place(std::array<double, kFeatureCount>& values,
                               const Normalizer& norm) {
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
        const double range = norm.max[d] - norm.min[d];
        if (range == 0.0) {
            values[d] = 0.0;
        } else {
            const double v = (values[d] - norm.min[d]) / range;
            values[d] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        }
    }
}

inline FeatureVector normalize(const FeatureVector& fv, const Normalizer& norm) {
    FeatureVector out = fv;
    normalize_in_place(out.values, norm);
    return out;
}

// Feature matrix as CSV: 90 named columns, then label and user.
inline void write_features_csv(std::ostream& os, std::span<const FeatureVector> vectors) {
    const auto& names = feature_names();
    for (std::size_t d = 0; d < kFeatureCount; ++d) os << names[d] << ',';
    os << "label,user\n";
    for (const auto& fv : vectors) {
        for (double v : fv.values) os << format_double(v) << ',';
        os << activity_name(fv.label) << ',' << fv.user_id << '\n';
    }
}

} // namespace har
