#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "har/activity.hpp"
#include "har/error.hpp"
#include "har/features.hpp"
#include "har/util.hpp"

namespace har {

enum class Distance : int { Euclidean = 0, Manhattan, Chebyshev };

inline constexpr std::array<std::string_view, 3> kDistanceNames = {"euclidean", "manhattan",
                                                                   "chebyshev"};

inline std::string_view distance_name(Distance d) {
    return kDistanceNames[static_cast<std::size_t>(d)];
}

inline std::optional<Distance> distance_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kDistanceNames.size(); ++i)
        if (kDistanceNames[i] == name) return static_cast<Distance>(i);
    return std::nullopt;
}

inline double distance(std::span<const double> a, std::span<const double> b, Distance metric) {
    if (a.size() != b.size())
        throw ConfigError("distance: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
    switch (metric) {
    case Distance::Euclidean: {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    case Distance::Manhattan: {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
        return acc;
    }
    case Distance::Chebyshev: {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
        return acc;
    }
    }
    throw ConfigError("unknown distance metric");
}

// Instance memory with a fixed bound and a distance function. Immutable after
// build; concurrent predict calls are safe.
//
// Tie-breaking is fully pinned for reproducibility: equal distances prefer
// the lower instance index, vote ties prefer the tied label whose nearest
// member is closest, then canonical activity order.
class KnnModel {
public:
    static KnnModel build(std::span<const std::vector<double>> instances,
                          std::span<const Activity> labels, std::size_t max_instances,
                          Distance metric) {
        if (instances.empty()) throw ConfigError("knn: empty instance set");
        if (instances.size() != labels.size())
            throw ConfigError("knn: instances and labels differ in length");
        KnnModel model;
        model.metric_ = metric;
        model.max_instances_ = max_instances;
        model.dim_ = instances[0].size();
        const std::size_t keep = std::min(instances.size(), max_instances);
        model.data_.reserve(keep * model.dim_);
        model.labels_.reserve(keep);
        for (std::size_t i = 0; i < keep; ++i) {
            if (instances[i].size() != model.dim_)
                throw ConfigError("knn: instance dimension mismatch at index " +
                                  std::to_string(i));
            model.data_.insert(model.data_.end(), instances[i].begin(), instances[i].end());
            model.labels_.push_back(labels[i]);
        }
        return model;
    }

    static KnnModel build(std::span<const FeatureVector> instances, std::size_t max_instances,
                          Distance metric) {
        if (instances.empty()) throw ConfigError("knn: empty instance set");
        KnnModel model;
        model.metric_ = metric;
        model.max_instances_ = max_instances;
        model.dim_ = kFeatureCount;
        const std::size_t keep = std::min(instances.size(), max_instances);
        model.data_.reserve(keep * model.dim_);
        model.labels_.reserve(keep);
        for (std::size_t i = 0; i < keep; ++i) {
            model.data_.insert(model.data_.end(), instances[i].values.begin(),
                               instances[i].values.end());
            model.labels_.push_back(instances[i].label);
        }
        return model;
    }

    std::size_t size() const { return labels_.size(); }
    std::size_t dimension() const { return dim_; }
    Distance metric() const { return metric_; }
    std::size_t max_instances() const { return max_instances_; }
    Activity label_at(std::size_t i) const { return labels_[i]; }
    std::span<const double> instance(std::size_t i) const {
        return std::span<const double>(data_).subspan(i * dim_, dim_);
    }

    Activity predict(std::span<const double> query, std::size_t k) const {
        if (k < 1 || k > size())
            throw ConfigError("knn: k=" + std::to_string(k) + " outside [1, " +
                              std::to_string(size()) + "]");
        if (query.size() != dim_) throw ConfigError("knn: query dimension mismatch");

        std::vector<double> dist(size());
        for (std::size_t i = 0; i < size(); ++i) dist[i] = distance(query, instance(i), metric_);

        std::vector<std::size_t> order(size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              if (dist[a] != dist[b]) return dist[a] < dist[b];
                              return a < b;
                          });

        std::array<std::size_t, kActivityCount> votes{};
        std::array<double, kActivityCount> nearest{};
        nearest.fill(std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t a = activity_index(labels_[order[r]]);
            ++votes[a];
            nearest[a] = std::min(nearest[a], dist[order[r]]);
        }

        std::size_t best = kActivityCount;
        for (std::size_t a = 0; a < kActivityCount; ++a) {
            if (votes[a] == 0) continue;
            if (best == kActivityCount || votes[a] > votes[best] ||
                (votes[a] == votes[best] && nearest[a] < nearest[best]))
                best = a;
        }
        return static_cast<Activity>(best);
    }

    std::vector<Activity> predict_batch(std::span<const std::vector<double>> queries,
                                        std::size_t k) const {
        std::vector<Activity> out;
        out.reserve(queries.size());
        for (const auto& q : queries) out.push_back(predict(q, k));
        return out;
    }

private:
    std::vector<double> data_; // row-major, size() x dim_
    std::vector<Activity> labels_;
    std::size_t dim_ = 0;
    std::size_t max_instances_ = 0;
    Distance metric_ = Distance::Euclidean;
};

// One instance per row: feature values then the activity name. Intended for
// cross-implementation checks.
inline void dump_model_csv(std::ostream& os, const KnnModel& model) {
    for (std::size_t i = 0; i < model.size(); ++i) {
        for (double v : model.instance(i)) os << format_double(v) << ',';
        os << activity_name(model.label_at(i)) << '\n';
    }
}

inline KnnModel load_model_csv(std::istream& is, Distance metric,
                               std::size_t max_instances = SIZE_MAX) {
    std::vector<std::vector<double>> instances;
    std::vector<Activity> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        std::string_view sv(line);
        std::string_view last;
        while (pos <= sv.size()) {
            const std::size_t comma = sv.find(',', pos);
            const std::string_view tok =
                sv.substr(pos, comma == std::string_view::npos ? sv.size() - pos : comma - pos);
            if (comma == std::string_view::npos) {
                last = tok;
                break;
            }
            row.push_back(parse_double(tok));
            pos = comma + 1;
        }
        const auto label = activity_from_name(last);
        if (!label) throw ParseError("model", line_no, "unknown label '" + std::string(last) + "'");
        instances.push_back(std::move(row));
        labels.push_back(*label);
    }
    return KnnModel::build(instances, labels, max_instances, metric);
}

} // namespace har
