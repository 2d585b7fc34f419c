#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "har/anova.hpp"
#include "har/evaluation.hpp"
#include "har/experiments.hpp"
#include "har/pareto.hpp"
#include "har/search.hpp"
#include "har/util.hpp"

namespace har {

// Reproducibility header written as '#' comment lines at the top of every
// report file.
struct ReportMeta {
    std::uint64_t seed = 0;
    std::uint64_t space_hash = 0;
    std::uint64_t dataset_hash = 0;
    double power_watts = 0.0;
    std::string command;
};

inline std::uint64_t dataset_hash(std::span<const SensorSession> sessions) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& s : sessions) {
        h = fnv1a64_value(s.user_id, h);
        h = fnv1a64_value(s.frequency_hz, h);
        h = fnv1a64_value(s.size(), h);
        for (Activity a : s.labels) h = fnv1a64_value(static_cast<int>(a), h);
        for (std::size_t c = 0; c < kChannelCount; ++c)
            for (std::size_t i = 0; i < s.channels[c].size(); i += 97)
                h = fnv1a64_value(s.channels[c][i], h);
    }
    return h;
}

inline void write_meta(std::ostream& os, const ReportMeta& meta) {
    os << "# seed=" << meta.seed << '\n';
    os << "# space_hash=" << meta.space_hash << '\n';
    os << "# dataset_hash=" << meta.dataset_hash << '\n';
    os << "# power_watts=" << format_double(meta.power_watts) << '\n';
    if (!meta.command.empty()) os << "# command=" << meta.command << '\n';
}

struct ResultRow {
    Configuration config;
    EvaluationResult result;
};

inline std::string results_csv_header() {
    std::string h =
        "config_id,window_size,overlap,k,distance,train_hz,test_hz,test_user,"
        "accuracy,macro_f1";
    for (std::size_t a = 0; a < kActivityCount; ++a) h += ",f1_A" + std::to_string(a + 1);
    h += ",mean_response_ms,energy_mJ,n_train,n_test";
    return h;
}

inline void write_result_row(std::ostream& os, const ResultRow& row) {
    const auto& c = row.config;
    const auto& r = row.result;
    os << r.config_id << ',' << c.window_size << ',' << format_double(c.overlap) << ',' << c.k
       << ',' << distance_name(c.distance) << ',' << format_hz(c.train_hz) << ','
       << format_hz(c.test_hz) << ',' << r.test_user << ',' << format_double(r.accuracy) << ','
       << format_double(r.macro_f1);
    for (double f1 : r.f1_per_activity) {
        os << ',';
        if (!std::isnan(f1)) os << format_double(f1);
    }
    os << ',' << format_double(r.mean_response_ms) << ',' << format_double(r.energy_mj) << ','
       << r.n_train << ',' << r.n_test << '\n';
}

inline void write_results_csv(std::ostream& os, std::span<const ResultRow> rows,
                              const ReportMeta& meta) {
    write_meta(os, meta);
    os << results_csv_header() << '\n';
    for (const auto& row : rows) write_result_row(os, row);
}

inline void write_results_csv(const std::filesystem::path& path, std::span<const ResultRow> rows,
                              const ReportMeta& meta) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    write_results_csv(os, rows, meta);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

} // namespace detail

// Reads back a results CSV (metadata lines are skipped). Confusion counts are
// not part of the CSV and stay empty.
inline std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open " + path.string());
    const std::string file = path.filename().string();

    std::vector<ResultRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != results_csv_header())
                throw ParseError(file, line_no, "unexpected results header");
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        const std::size_t expected = 14 + kActivityCount;
        if (fields.size() != expected)
            throw ParseError(file, line_no,
                             "expected " + std::to_string(expected) + " fields, got " +
                                 std::to_string(fields.size()));
        ResultRow row;
        row.config.config_id = parse_long(fields[0]);
        row.config.window_size = static_cast<int>(parse_long(fields[1]));
        row.config.overlap = parse_double(fields[2]);
        row.config.k = static_cast<int>(parse_long(fields[3]));
        const auto dist = distance_from_name(fields[4]);
        if (!dist) throw ParseError(file, line_no, "unknown distance '" + fields[4] + "'");
        row.config.distance = *dist;
        row.config.train_hz = parse_double(fields[5]);
        row.config.test_hz = parse_double(fields[6]);
        row.result.config_id = row.config.config_id;
        row.result.test_user = static_cast<int>(parse_long(fields[7]));
        row.result.accuracy = parse_double(fields[8]);
        row.result.macro_f1 = parse_double(fields[9]);
        for (std::size_t a = 0; a < kActivityCount; ++a) {
            const auto& f = fields[10 + a];
            row.result.f1_per_activity[a] =
                f.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(f);
        }
        row.result.mean_response_ms = parse_double(fields[10 + kActivityCount]);
        row.result.energy_mj = parse_double(fields[11 + kActivityCount]);
        row.result.n_train = static_cast<std::size_t>(parse_long(fields[12 + kActivityCount]));
        row.result.n_test = static_cast<std::size_t>(parse_long(fields[13 + kActivityCount]));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_front_csv(std::ostream& os, std::span<const ParetoPoint> front,
                            std::span<const std::string> objective_names,
                            const ReportMeta& meta) {
    write_meta(os, meta);
    os << "config_id";
    for (const auto& name : objective_names) os << ',' << name;
    os << '\n';
    for (const auto& p : front) {
        os << p.config_id;
        for (double v : p.objectives) os << ',' << format_double(v);
        os << '\n';
    }
}

inline void write_front_json(std::ostream& os, std::span<const ParetoPoint> front,
                             std::span<const std::string> objective_names,
                             const ReportMeta& meta) {
    os << "{\n  \"seed\": " << meta.seed << ",\n  \"points\": [\n";
    for (std::size_t i = 0; i < front.size(); ++i) {
        os << "    {\"config_id\": " << front[i].config_id;
        for (std::size_t j = 0; j < objective_names.size(); ++j)
            os << ", \"" << objective_names[j] << "\": " << format_double(front[i].objectives[j]);
        os << '}' << (i + 1 < front.size() ? "," : "") << '\n';
    }
    os << "  ]\n}\n";
}

inline void write_importance_csv(std::ostream& os,
                                 std::span<const std::pair<std::string, ImportanceReport>> reports,
                                 const ReportMeta& meta) {
    write_meta(os, meta);
    os << "metric,term,share\n";
    for (const auto& [metric, report] : reports) {
        for (std::size_t a = 0; a < kHyperAxisCount; ++a)
            os << metric << ',' << kHyperAxisNames[a] << ','
               << format_double(report.main_share[a]) << '\n';
        for (std::size_t p = 0; p < kHyperAxisPairs.size(); ++p)
            os << metric << ',' << kHyperAxisNames[kHyperAxisPairs[p][0]] << '*'
               << kHyperAxisNames[kHyperAxisPairs[p][1]] << ','
               << format_double(report.pair_share[p]) << '\n';
        os << metric << ",residual," << format_double(report.residual_share) << '\n';
    }
}

inline void write_frequency_csv(std::ostream& os, std::span<const FrequencyMatrix> matrices,
                                const ReportMeta& meta) {
    write_meta(os, meta);
    for (const auto& m : matrices) {
        os << "user," << m.user << '\n';
        os << "train_hz\\test_hz";
        for (double hz : m.test_hz) os << ',' << format_hz(hz);
        os << '\n';
        for (std::size_t tr = 0; tr < m.train_hz.size(); ++tr) {
            os << format_hz(m.train_hz[tr]);
            for (std::size_t te = 0; te < m.test_hz.size(); ++te) {
                os << ',';
                const auto& cell = m.at(tr, te);
                if (cell.valid) os << format_double(cell.accuracy);
            }
            os << '\n';
        }
    }
}

// Per-user best/worst frequency pairs, one summary row each.
inline void write_frequency_summary_csv(std::ostream& os,
                                        std::span<const FrequencyMatrix> matrices,
                                        const ReportMeta& meta) {
    write_meta(os, meta);
    os << "user,max_train_hz,max_test_hz,max_accuracy,min_train_hz,min_test_hz,min_accuracy\n";
    for (const auto& m : matrices) {
        const auto hi = m.argmax();
        const auto lo = m.argmin();
        os << m.user << ',';
        if (hi)
            os << format_hz(m.train_hz[hi->first]) << ',' << format_hz(m.test_hz[hi->second])
               << ',' << format_double(m.at(hi->first, hi->second).accuracy);
        else
            os << ",,";
        os << ',';
        if (lo)
            os << format_hz(m.train_hz[lo->first]) << ',' << format_hz(m.test_hz[lo->second])
               << ',' << format_double(m.at(lo->first, lo->second).accuracy);
        else
            os << ",,";
        os << '\n';
    }
}

} // namespace har
