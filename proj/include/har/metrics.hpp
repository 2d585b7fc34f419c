#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "har/error.hpp"

namespace har {

struct ConfusionMatrix {
    std::size_t classes = 0;
    std::vector<std::int64_t> counts; // row = truth, column = prediction

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t n) : classes(n), counts(n * n, 0) {}

    std::int64_t& at(std::size_t truth, std::size_t pred) { return counts[truth * classes + pred]; }
    std::int64_t at(std::size_t truth, std::size_t pred) const {
        return counts[truth * classes + pred];
    }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
    std::int64_t trace() const {
        std::int64_t t = 0;
        for (std::size_t i = 0; i < classes; ++i) t += at(i, i);
        return t;
    }
};

struct ClassScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0; // occurrences in ground truth
    bool defined = false;     // false when absent from truth and predictions
};

struct F1Report {
    std::vector<ClassScore> per_class;
    double macro_f1 = 0.0; // mean over classes present in ground truth
    double accuracy = 0.0;
};

inline F1Report f1_scores(const ConfusionMatrix& cm) {
    F1Report report;
    report.per_class.resize(cm.classes);
    const std::int64_t total = cm.total();
    report.accuracy = total > 0 ? static_cast<double>(cm.trace()) / static_cast<double>(total) : 0.0;

    double macro_sum = 0.0;
    std::size_t macro_n = 0;
    for (std::size_t c = 0; c < cm.classes; ++c) {
        std::int64_t tp = cm.at(c, c), fp = 0, fn = 0;
        for (std::size_t o = 0; o < cm.classes; ++o) {
            if (o == c) continue;
            fp += cm.at(o, c);
            fn += cm.at(c, o);
        }
        auto& score = report.per_class[c];
        score.support = tp + fn;
        if (score.support == 0 && fp == 0) continue; // absent everywhere: undefined
        score.defined = true;
        score.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        score.recall = score.support > 0 ? static_cast<double>(tp) / static_cast<double>(score.support) : 0.0;
        const double pr = score.precision + score.recall;
        score.f1 = pr > 0.0 ? 2.0 * score.precision * score.recall / pr : 0.0;
        if (score.support > 0) {
            macro_sum += score.f1;
            ++macro_n;
        }
    }
    report.macro_f1 = macro_n > 0 ? macro_sum / static_cast<double>(macro_n) : 0.0;
    return report;
}

inline double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ConfigError("pearson: length mismatch");
    if (xs.size() < 2) throw ConfigError("pearson: need at least 2 points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0) throw ConfigError("pearson: xs is constant");
    if (syy == 0.0) throw ConfigError("pearson: ys is constant");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace har
