#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "har/evaluation.hpp"
#include "har/search.hpp"

namespace har {

enum class SweepAxis { WindowSize, Overlap, K };

inline std::string_view sweep_axis_name(SweepAxis a) {
    switch (a) {
    case SweepAxis::WindowSize: return "window_size";
    case SweepAxis::Overlap: return "overlap";
    case SweepAxis::K: return "k";
    }
    return "?";
}

inline std::optional<SweepAxis> sweep_axis_from_name(std::string_view s) {
    if (s == "window_size") return SweepAxis::WindowSize;
    if (s == "overlap") return SweepAxis::Overlap;
    if (s == "k") return SweepAxis::K;
    return std::nullopt;
}

// Sweep presets: one hyperparameter varies, the others stay fixed.
struct SweepPreset {
    std::vector<double> values;
    Configuration base;
};

inline SweepPreset default_sweep(SweepAxis axis) {
    SweepPreset p;
    p.base.distance = Distance::Euclidean;
    switch (axis) {
    case SweepAxis::WindowSize:
        p.values = {100, 150, 250, 300, 350, 500, 550, 600, 650, 750, 800, 850, 900};
        p.base.overlap = 0.5;
        p.base.k = 10;
        break;
    case SweepAxis::Overlap:
        p.values = {0.0, 0.1, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9};
        p.base.window_size = 250;
        p.base.k = 9;
        break;
    case SweepAxis::K:
        p.values = {1, 2, 3, 5, 6, 9, 10};
        p.base.window_size = 250;
        p.base.overlap = 0.8;
        break;
    }
    return p;
}

using ConfigEvaluator = std::function<EvaluationResult(const Configuration&)>;

struct SweepPoint {
    double value = 0.0;
    Configuration config;
    EvaluationResult result;
};

struct SweepOutcome {
    SweepAxis axis = SweepAxis::WindowSize;
    std::vector<SweepPoint> points;
    std::vector<std::string> warnings; // skipped invalid combinations
};

// Evaluates one configuration per sweep value, everything else fixed.
// Invalid combinations (rescaled window below 2 samples or step below 1)
// are skipped with a warning instead of failing the sweep.
inline SweepOutcome fixed_value_sweep(SweepAxis axis, std::span<const double> values,
                                      const Configuration& fixed,
                                      const ConfigEvaluator& evaluator) {
    SweepOutcome outcome;
    outcome.axis = axis;
    for (double value : values) {
        Configuration c = fixed;
        switch (axis) {
        case SweepAxis::WindowSize: c.window_size = static_cast<int>(value); break;
        case SweepAxis::Overlap: c.overlap = value; break;
        case SweepAxis::K: c.k = static_cast<int>(value); break;
        }
        if (!configuration_valid(c)) {
            outcome.warnings.push_back(std::string(sweep_axis_name(axis)) + "=" +
                                       format_double(value) + " skipped: invalid combination");
            continue;
        }
        outcome.points.push_back({value, c, evaluator(c)});
    }
    return outcome;
}

// Aligned metric vectors for correlation analysis against the swept value.
struct SweepSeries {
    std::vector<double> values;
    std::vector<double> accuracy;
    std::vector<double> response_ms;
    std::vector<double> extract_ms;
    std::vector<double> extract_plus_infer_ms;
    std::vector<double> energy_mj;
};

inline SweepSeries sweep_series(const SweepOutcome& outcome) {
    SweepSeries s;
    for (const auto& p : outcome.points) {
        s.values.push_back(p.value);
        s.accuracy.push_back(p.result.accuracy);
        s.response_ms.push_back(p.result.mean_response_ms);
        s.extract_ms.push_back(p.result.extract_ms);
        s.extract_plus_infer_ms.push_back(p.result.extract_ms + p.result.infer_ms);
        s.energy_mj.push_back(p.result.energy_mj);
    }
    return s;
}

struct FrequencyCell {
    bool valid = false;
    double accuracy = 0.0;
    std::string error;
};

struct FrequencyMatrix {
    int user = 0;
    std::vector<double> train_hz;
    std::vector<double> test_hz;
    std::vector<FrequencyCell> cells; // row-major: train x test

    const FrequencyCell& at(std::size_t tr, std::size_t te) const {
        return cells[tr * test_hz.size() + te];
    }
    FrequencyCell& at(std::size_t tr, std::size_t te) { return cells[tr * test_hz.size() + te]; }

    // (train index, test index) of the best/worst valid cell; scan order
    // breaks ties toward the first occurrence.
    std::optional<std::pair<std::size_t, std::size_t>> argmax() const { return extremum(true); }
    std::optional<std::pair<std::size_t, std::size_t>> argmin() const { return extremum(false); }

private:
    std::optional<std::pair<std::size_t, std::size_t>> extremum(bool max) const {
        std::optional<std::pair<std::size_t, std::size_t>> best;
        double best_acc = 0.0;
        for (std::size_t tr = 0; tr < train_hz.size(); ++tr)
            for (std::size_t te = 0; te < test_hz.size(); ++te) {
                const auto& cell = at(tr, te);
                if (!cell.valid) continue;
                if (!best || (max ? cell.accuracy > best_acc : cell.accuracy < best_acc)) {
                    best = {tr, te};
                    best_acc = cell.accuracy;
                }
            }
        return best;
    }
};

using UserConfigEvaluator = std::function<EvaluationResult(const Configuration&, int user)>;

// Per user, evaluates the configuration over every train/test frequency pair.
// Window duration is preserved across frequencies; pairs whose rescaled
// window is unusable are marked invalid rather than failing the matrix.
inline std::vector<FrequencyMatrix> frequency_matrix(std::span<const int> users,
                                                     std::span<const double> train_freqs,
                                                     std::span<const double> test_freqs,
                                                     const Configuration& config,
                                                     const UserConfigEvaluator& evaluator) {
    std::vector<FrequencyMatrix> matrices;
    for (int user : users) {
        FrequencyMatrix m;
        m.user = user;
        m.train_hz.assign(train_freqs.begin(), train_freqs.end());
        m.test_hz.assign(test_freqs.begin(), test_freqs.end());
        m.cells.resize(train_freqs.size() * test_freqs.size());
        for (std::size_t tr = 0; tr < train_freqs.size(); ++tr) {
            for (std::size_t te = 0; te < test_freqs.size(); ++te) {
                Configuration c = config;
                c.train_hz = train_freqs[tr];
                c.test_hz = test_freqs[te];
                auto& cell = m.at(tr, te);
                if (!configuration_valid(c)) {
                    cell.error = "invalid window at this frequency";
                    continue;
                }
                try {
                    cell.accuracy = evaluator(c, user).accuracy;
                    cell.valid = true;
                } catch (const Error& e) {
                    cell.error = e.what();
                }
            }
        }
        matrices.push_back(std::move(m));
    }
    return matrices;
}

} // namespace har
