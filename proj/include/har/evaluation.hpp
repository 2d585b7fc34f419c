#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "har/dataset.hpp"
#include "har/features.hpp"
#include "har/knn.hpp"
#include "har/metrics.hpp"
#include "har/segmentation.hpp"
#include "har/timing.hpp"

namespace har {

// One point of the search grid. `window_size` is in samples at the 100 Hz
// base rate; when train/test run at other frequencies the size is rescaled
// so a window always spans the same number of seconds.
struct Configuration {
    int window_size = 0;
    double overlap = 0.0;
    int k = 1;
    Distance distance = Distance::Euclidean;
    double train_hz = 100.0;
    double test_hz = 100.0;
    long config_id = -1;
};

inline std::size_t rescaled_window_samples(int window_size, double hz) {
    const double scaled = static_cast<double>(window_size) * hz / 100.0;
    const long long r = std::llround(scaled);
    return r < 0 ? 0 : static_cast<std::size_t>(r);
}

// A rescaled window is usable when it still has at least 2 samples and the
// un-clamped step is at least 1 sample.
inline bool window_valid_at(int window_size, double overlap, double hz) {
    const std::size_t size = rescaled_window_samples(window_size, hz);
    if (size < 2) return false;
    return WindowSpec{size, overlap}.raw_step() >= 1;
}

inline bool configuration_valid(const Configuration& c) {
    if (c.k < 1 || c.window_size < 1) return false;
    if (c.overlap < 0.0 || c.overlap >= 1.0) return false;
    return window_valid_at(c.window_size, c.overlap, c.train_hz) &&
           window_valid_at(c.window_size, c.overlap, c.test_hz);
}

struct EvaluationResult {
    long config_id = -1;
    int test_user = 0;
    double accuracy = 0.0;
    std::array<double, kActivityCount> f1_per_activity{}; // NaN when undefined
    double macro_f1 = 0.0;
    double mean_response_ms = 0.0;
    double read_ms = 0.0;
    double extract_ms = 0.0;
    double infer_ms = 0.0;
    double energy_mj = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    ConfusionMatrix confusion;
};

struct EvalOptions {
    std::size_t max_train_instances = 1661;
    std::size_t warmup_inferences = 10;
};

namespace detail {

inline ActivityDistribution sessions_label_distribution(
    std::span<const SensorSession* const> sessions) {
    ActivityDistribution dist{};
    double total = 0.0;
    for (const SensorSession* s : sessions) {
        for (Activity a : s->labels) dist[activity_index(a)] += 1.0;
        total += static_cast<double>(s->size());
    }
    if (total > 0)
        for (double& d : dist) d /= total;
    return dist;
}

// Renders session rows as text lines (27 channel values, space separated) in
// the shortest form that parses back to the identical double. The measured
// read stage consumes these, emulating a streaming reader that only ingests
// samples it has not seen.
inline std::vector<std::string> render_rows(const SensorSession& s, std::size_t from,
                                            std::size_t to) {
    std::vector<std::string> lines;
    lines.reserve(to - from);
    char buf[32];
    for (std::size_t i = from; i < to; ++i) {
        std::string line;
        line.reserve(kChannelCount * 12);
        for (std::size_t c = 0; c < kChannelCount; ++c) {
            if (c > 0) line.push_back(' ');
            auto res = std::to_chars(buf, buf + sizeof(buf), s.channels[c][i]);
            line.append(buf, res.ptr);
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

struct StreamBuffer {
    std::array<std::vector<double>, kChannelCount> cols;
    std::size_t begin = 0; // absolute index of first buffered row
    std::size_t end = 0;   // absolute index one past the last buffered row

    void reset(std::size_t at) {
        for (auto& c : cols) c.clear();
        begin = end = at;
    }
    void drop_until(std::size_t at) {
        if (at <= begin) return;
        const std::size_t n = at - begin;
        for (auto& c : cols) c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n));
        begin = at;
    }
    void parse_line(std::string_view line) {
        std::size_t pos = 0;
        for (std::size_t c = 0; c < kChannelCount; ++c) {
            while (pos < line.size() && line[pos] == ' ') ++pos;
            double v = 0.0;
            auto res = std::from_chars(line.data() + pos, line.data() + line.size(), v);
            pos = static_cast<std::size_t>(res.ptr - line.data());
            cols[c].push_back(v);
        }
        ++end;
    }
};

} // namespace detail

// Runs one configuration end to end under leave-one-subject-out:
// split -> downsample -> segment -> cap training instances -> features ->
// min-max normalize -> kNN -> predict the held-out user's windows.
// Accuracy and F1 are bitwise deterministic given (sessions, config, seed);
// the timing fields are the only nondeterministic outputs.
inline EvaluationResult evaluate_config(const Configuration& config,
                                        std::span<const SensorSession> sessions, int test_user,
                                        const PowerMeter& meter, std::uint64_t seed,
                                        const EvalOptions& options = {}) {
    if (!configuration_valid(config))
        throw ConfigError("configuration invalid: window " + std::to_string(config.window_size) +
                          " overlap " + format_double(config.overlap) + " at train " +
                          format_hz(config.train_hz) + " Hz / test " + format_hz(config.test_hz) +
                          " Hz");

    const LosoSplit split = split_loso(sessions, test_user);
    const ActivityDistribution reference = detail::sessions_label_distribution(split.train);

    // Downsampled copies only where the rate actually changes.
    std::vector<SensorSession> owned;
    owned.reserve(split.train.size() + 1);
    std::vector<const SensorSession*> train_sessions;
    for (const SensorSession* s : split.train) {
        if (s->frequency_hz == config.train_hz) {
            train_sessions.push_back(s);
        } else {
            owned.push_back(downsample(*s, config.train_hz));
            train_sessions.push_back(&owned.back());
        }
    }
    const SensorSession* test_session = split.test;
    if (test_session->frequency_hz != config.test_hz) {
        owned.push_back(downsample(*test_session, config.test_hz));
        test_session = &owned.back();
    }

    const WindowSpec train_spec{rescaled_window_samples(config.window_size, config.train_hz),
                                config.overlap};
    const WindowSpec test_spec{rescaled_window_samples(config.window_size, config.test_hz),
                               config.overlap};

    const std::vector<Window> train_windows =
        segment(std::span<const SensorSession* const>(train_sessions), train_spec);
    if (train_windows.empty()) throw ConfigError("no instances: no training windows fit any run");
    const std::vector<Window> capped =
        cap_instances(train_windows, options.max_train_instances, reference, seed);

    std::vector<FeatureVector> train_vectors;
    train_vectors.reserve(capped.size());
    for (const Window& w : capped) train_vectors.push_back(extract_features(w));
    const Normalizer norm = fit_normalizer(train_vectors);
    for (auto& fv : train_vectors) normalize_in_place(fv.values, norm);

    const KnnModel model =
        KnnModel::build(train_vectors, options.max_train_instances, config.distance);
    if (static_cast<std::size_t>(config.k) > model.size())
        throw ConfigError("k=" + std::to_string(config.k) + " exceeds the " +
                          std::to_string(model.size()) + " stored training instances");

    const std::vector<Window> test_windows = segment(*test_session, test_spec);
    if (test_windows.empty()) throw ConfigError("no instances: no test windows fit any run");

    // Measured loop. Reading is modeled as a streaming ingest: each inference
    // parses only the rows the sliding buffer has not seen yet. The rows'
    // text form is staged untimed, the timed read stage parses it.
    detail::StreamBuffer buffer;
    std::vector<std::string> pending_lines;
    std::array<double, kFeatureCount> query{};
    std::vector<Activity> predictions(test_windows.size());

    const auto needs_reset = [&](std::size_t i) {
        const Window& w = test_windows[i];
        return i == 0 || w.start < buffer.begin || w.start > buffer.end;
    };

    const auto stats = measure_response(
        test_windows.size(), options.warmup_inferences,
        [&](std::size_t i) {
            const Window& w = test_windows[i];
            if (needs_reset(i))
                buffer.reset(w.start);
            else
                buffer.drop_until(w.start);
            for (const auto& line : pending_lines) buffer.parse_line(line);
        },
        [&](std::size_t i) {
            std::array<std::span<const double>, kChannelCount> ch;
            for (std::size_t c = 0; c < kChannelCount; ++c)
                ch[c] = std::span<const double>(buffer.cols[c]);
            FeatureVector fv = extract_features(ch, test_windows[i].activity,
                                                test_windows[i].user_id);
            normalize_in_place(fv.values, norm);
            query = fv.values;
        },
        [&](std::size_t i) { predictions[i] = model.predict(query, config.k); },
        [&](std::size_t i) {
            const Window& w = test_windows[i];
            const std::size_t from = needs_reset(i) ? w.start : std::max(w.start, buffer.end);
            pending_lines = detail::render_rows(*test_session, from, w.start + w.size);
        });

    EvaluationResult result;
    result.config_id = config.config_id;
    result.test_user = test_user;
    result.n_train = model.size();
    result.n_test = test_windows.size();

    ConfusionMatrix cm(kActivityCount);
    for (std::size_t i = 0; i < test_windows.size(); ++i)
        ++cm.at(activity_index(test_windows[i].activity), activity_index(predictions[i]));
    const F1Report f1 = f1_scores(cm);
    result.accuracy = f1.accuracy;
    result.macro_f1 = f1.macro_f1;
    for (std::size_t a = 0; a < kActivityCount; ++a)
        result.f1_per_activity[a] = f1.per_class[a].defined
                                        ? f1.per_class[a].f1
                                        : std::numeric_limits<double>::quiet_NaN();
    result.confusion = std::move(cm);

    result.mean_response_ms = stats.mean_total_ms;
    result.read_ms = stats.mean_read_ms;
    result.extract_ms = stats.mean_extract_ms;
    result.infer_ms = stats.mean_infer_ms;
    result.energy_mj = estimate_energy(result.mean_response_ms, meter);
    return result;
}

} // namespace har
