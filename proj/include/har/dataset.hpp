#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "har/error.hpp"
#include "har/session.hpp"
#include "har/util.hpp"

namespace har {

// Raw recording layout: space separated, 54 columns.
//   col 0 timestamp (s), col 1 activity id, col 2 heart rate,
//   cols 3-19 wrist IMU, 20-36 chest IMU, 37-53 ankle IMU.
// Each 17-column IMU block: temperature, 3x acc (16g), 3x acc (6g),
// 3x gyro, 3x mag, 4x orientation.
inline constexpr std::size_t kRawColumnCount = 54;
inline constexpr std::array<std::size_t, kPlacementCount> kImuBlockStart = {3, 20, 37};

// The 16g accelerometer is used; the 6g unit saturates during running.
inline constexpr std::array<std::size_t, kSensorCount> kSensorOffsetInBlock = {1, 7, 10};

namespace detail {

inline double parse_raw_field(std::string_view tok, const std::string& file, std::size_t line_no) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError(file, line_no, "bad numeric field '" + std::string(tok) + "'");
    return v;
}

inline int user_id_from_filename(const std::filesystem::path& path) {
    const std::string stem = path.stem().string();
    std::size_t i = stem.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(stem[i - 1]))) --i;
    if (i == stem.size())
        throw ParseError("cannot derive user id from file name '" + stem + "'");
    int n = std::stoi(stem.substr(i));
    if (n > 100) n -= 100; // subject101 -> user 1
    return n;
}

} // namespace detail

// Parses one recording file. Transient-labeled rows (activity id 0) are
// dropped; only accelerometer/gyroscope/magnetometer columns are kept.
inline SensorSession load_session_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());

    SensorSession session;
    session.user_id = detail::user_id_from_filename(path);
    session.frequency_hz = 100.0;

    std::vector<std::string_view> tokens;
    tokens.reserve(kRawColumnCount);
    const std::string file = path.filename().string();

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        tokens.clear();
        std::size_t pos = 0;
        const std::string_view sv(line);
        while (pos < sv.size()) {
            while (pos < sv.size() && (sv[pos] == ' ' || sv[pos] == '\t' || sv[pos] == '\r')) ++pos;
            if (pos >= sv.size()) break;
            std::size_t end = pos;
            while (end < sv.size() && sv[end] != ' ' && sv[end] != '\t' && sv[end] != '\r') ++end;
            tokens.push_back(sv.substr(pos, end - pos));
            pos = end;
        }
        if (tokens.empty()) continue;
        if (tokens.size() != kRawColumnCount)
            throw ParseError(file, line_no,
                             "expected " + std::to_string(kRawColumnCount) + " columns, got " +
                                 std::to_string(tokens.size()));

        // Every column is parsed; heart rate, temperature and orientation are
        // then discarded.
        std::array<double, kRawColumnCount> values;
        for (std::size_t i = 0; i < kRawColumnCount; ++i)
            values[i] = detail::parse_raw_field(tokens[i], file, line_no);

        const long activity_id = std::lround(values[1]);
        if (activity_id == kTransientActivityId) continue;
        const auto activity = activity_from_file_id(static_cast<int>(activity_id));
        if (!activity)
            throw ParseError(file, line_no, "unknown activity id " + std::to_string(activity_id));

        session.timestamps.push_back(values[0]);
        session.labels.push_back(*activity);
        for (std::size_t p = 0; p < kPlacementCount; ++p) {
            for (std::size_t s = 0; s < kSensorCount; ++s) {
                const std::size_t base = kImuBlockStart[p] + kSensorOffsetInBlock[s];
                for (std::size_t a = 0; a < kAxisCount; ++a) {
                    const std::size_t c = channel_index(static_cast<Placement>(p),
                                                        static_cast<SensorKind>(s), a);
                    session.channels[c].push_back(values[base + a]);
                }
            }
        }
    }
    return session;
}

// Loads every *.dat recording in a directory, one session per user, in
// parallel. Returns sessions sorted by user id.
inline std::vector<SensorSession> load_pamap2(const std::filesystem::path& directory) {
    if (!std::filesystem::is_directory(directory))
        throw ParseError("not a directory: " + directory.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory))
        if (entry.is_regular_file() && entry.path().extension() == ".dat")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<std::future<SensorSession>> jobs;
    jobs.reserve(files.size());
    for (const auto& f : files)
        jobs.push_back(std::async(std::launch::async, [f] { return load_session_file(f); }));

    std::vector<SensorSession> sessions;
    sessions.reserve(jobs.size());
    for (auto& j : jobs) sessions.push_back(j.get());
    std::sort(sessions.begin(), sessions.end(),
              [](const SensorSession& a, const SensorSession& b) { return a.user_id < b.user_id; });
    return sessions;
}

struct CleanPolicy {
    // Rows where an entire sensor triplet is missing for longer than this are
    // dropped instead of interpolated.
    double max_sensor_gap_seconds = 1.0;
};

// Replaces missing values: linear interpolation inside a gap, nearest value
// at the edges. Rows inside over-long whole-sensor dropouts are removed
// first. A channel with no data at all is an error.
inline SensorSession clean(const SensorSession& session, const CleanPolicy& policy = {}) {
    const std::size_t n = session.size();
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        bool any = false;
        for (double v : session.channels[c])
            if (!std::isnan(v)) { any = true; break; }
        if (!any && n > 0)
            throw Error("channel " + channel_name(c) + " contains no data");
    }
    if (n == 0) return session;

    // Mark rows belonging to whole-sensor gaps longer than the threshold.
    const auto gap_limit =
        static_cast<std::size_t>(policy.max_sensor_gap_seconds * session.frequency_hz);
    std::vector<char> drop(n, 0);
    for (std::size_t p = 0; p < kPlacementCount; ++p) {
        for (std::size_t s = 0; s < kSensorCount; ++s) {
            const std::size_t c0 = channel_index(static_cast<Placement>(p),
                                                 static_cast<SensorKind>(s), 0);
            std::size_t run_start = 0;
            bool in_run = false;
            for (std::size_t i = 0; i <= n; ++i) {
                const bool missing = i < n && std::isnan(session.channels[c0][i]) &&
                                     std::isnan(session.channels[c0 + 1][i]) &&
                                     std::isnan(session.channels[c0 + 2][i]);
                if (missing && !in_run) { in_run = true; run_start = i; }
                if (!missing && in_run) {
                    in_run = false;
                    if (i - run_start > gap_limit)
                        std::fill(drop.begin() + run_start, drop.begin() + i, 1);
                }
            }
        }
    }

    SensorSession out;
    out.user_id = session.user_id;
    out.frequency_hz = session.frequency_hz;
    for (std::size_t i = 0; i < n; ++i) {
        if (drop[i]) continue;
        out.timestamps.push_back(session.timestamps[i]);
        out.labels.push_back(session.labels[i]);
        for (std::size_t c = 0; c < kChannelCount; ++c)
            out.channels[c].push_back(session.channels[c][i]);
    }

    const std::size_t m = out.size();
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        auto& col = out.channels[c];
        std::size_t i = 0;
        while (i < m) {
            if (!std::isnan(col[i])) { ++i; continue; }
            std::size_t gap_end = i;
            while (gap_end < m && std::isnan(col[gap_end])) ++gap_end;
            const bool has_left = i > 0;
            const bool has_right = gap_end < m;
            if (!has_left && !has_right)
                throw Error("channel " + channel_name(c) + " contains no data");
            for (std::size_t j = i; j < gap_end; ++j) {
                if (has_left && has_right) {
                    const double left = col[i - 1];
                    const double right = col[gap_end];
                    const double t = static_cast<double>(j - (i - 1)) /
                                     static_cast<double>(gap_end - (i - 1));
                    col[j] = left + t * (right - left);
                } else if (has_left) {
                    col[j] = col[i - 1];
                } else {
                    col[j] = col[gap_end];
                }
            }
            i = gap_end;
        }
    }
    return out;
}

// Decimates to the target frequency by keeping every r-th sample, phase 0.
inline SensorSession downsample(const SensorSession& session, double target_hz) {
    if (target_hz <= 0.0) throw ConfigError("target frequency must be positive");
    const double ratio = session.frequency_hz / target_hz;
    const auto r = static_cast<std::size_t>(std::llround(ratio));
    if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9)
        throw ConfigError("cannot downsample " + format_hz(session.frequency_hz) + " Hz to " +
                          format_hz(target_hz) + " Hz: non-integral ratio");
    if (r == 1) {
        SensorSession copy = session;
        copy.frequency_hz = target_hz;
        return copy;
    }

    SensorSession out;
    out.user_id = session.user_id;
    out.frequency_hz = target_hz;
    const std::size_t n = session.size();
    for (std::size_t i = 0; i < n; i += r) {
        out.timestamps.push_back(session.timestamps[i]);
        out.labels.push_back(session.labels[i]);
        for (std::size_t c = 0; c < kChannelCount; ++c)
            out.channels[c].push_back(session.channels[c][i]);
    }
    return out;
}

struct LosoSplit {
    std::vector<const SensorSession*> train;
    const SensorSession* test = nullptr;
};

// Leave-one-subject-out: the named user is the test set, everyone else trains.
inline LosoSplit split_loso(std::span<const SensorSession> sessions, int test_user) {
    LosoSplit split;
    for (const auto& s : sessions) {
        if (s.user_id == test_user)
            split.test = &s;
        else
            split.train.push_back(&s);
    }
    if (!split.test)
        throw ConfigError("unknown test user " + std::to_string(test_user));
    return split;
}

} // namespace har
