// Command line front end: ingest recordings, evaluate configurations, run
// sweeps, Pareto searches, importance analyses and frequency matrices, and
// write the CSV/JSON reports.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "har/har.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string dataset_dir;
    std::string out_dir = "out";
    std::string manifest;
    std::vector<int> users;
    std::uint64_t seed = 42;
    double power_watts = 1.9;
    std::size_t trials = 1000;
    std::size_t population = 50;
    std::size_t max_train_instances = 1661;
    std::size_t warmup = 10;
    int parallel = 1;

    int window_size = 900;
    double overlap = 0.0;
    int k = 9;
    std::string distance = "manhattan";
    std::vector<double> train_hz = {100.0};
    std::vector<double> test_hz = {100.0};

    std::string sweep_axis = "window_size";
    std::vector<double> sweep_values;
    std::vector<std::string> objectives = {"accuracy", "response"};

    har::SearchSpace space = har::SearchSpace::full_grid();

    // whether the fixed-configuration fields were given explicitly
    bool window_set = false;
    bool overlap_set = false;
    bool k_set = false;
};

har::Distance parse_distance(const std::string& name) {
    const auto d = har::distance_from_name(name);
    if (!d) throw CLI::ValidationError("--distance", "unknown distance '" + name + "'");
    return *d;
}

void apply_manifest(Options& opts) {
    std::ifstream is(opts.manifest);
    if (!is) throw har::ConfigError("cannot open manifest " + opts.manifest);
    json m = json::parse(is);

    if (m.contains("dataset_dir")) opts.dataset_dir = m["dataset_dir"].get<std::string>();
    if (m.contains("out_dir")) opts.out_dir = m["out_dir"].get<std::string>();
    if (m.contains("users")) opts.users = m["users"].get<std::vector<int>>();
    if (m.contains("seed")) opts.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("power_watts")) opts.power_watts = m["power_watts"].get<double>();
    if (m.contains("trials")) opts.trials = m["trials"].get<std::size_t>();
    if (m.contains("population")) opts.population = m["population"].get<std::size_t>();
    if (m.contains("max_train_instances"))
        opts.max_train_instances = m["max_train_instances"].get<std::size_t>();
    if (m.contains("warmup")) opts.warmup = m["warmup"].get<std::size_t>();
    if (m.contains("parallel")) opts.parallel = m["parallel"].get<int>();
    if (m.contains("train_hz")) opts.train_hz = m["train_hz"].get<std::vector<double>>();
    if (m.contains("test_hz")) opts.test_hz = m["test_hz"].get<std::vector<double>>();
    if (m.contains("objectives"))
        opts.objectives = m["objectives"].get<std::vector<std::string>>();

    if (m.contains("config")) {
        const auto& c = m["config"];
        if (c.contains("window_size")) {
            opts.window_size = c["window_size"].get<int>();
            opts.window_set = true;
        }
        if (c.contains("overlap")) {
            opts.overlap = c["overlap"].get<double>();
            opts.overlap_set = true;
        }
        if (c.contains("k")) {
            opts.k = c["k"].get<int>();
            opts.k_set = true;
        }
        if (c.contains("distance")) opts.distance = c["distance"].get<std::string>();
        if (c.contains("train_hz")) opts.train_hz = {c["train_hz"].get<double>()};
        if (c.contains("test_hz")) opts.test_hz = {c["test_hz"].get<double>()};
    }
    if (m.contains("sweep")) {
        const auto& s = m["sweep"];
        if (s.contains("axis")) opts.sweep_axis = s["axis"].get<std::string>();
        if (s.contains("values")) opts.sweep_values = s["values"].get<std::vector<double>>();
    }
    if (m.contains("space")) {
        const auto& s = m["space"];
        har::SearchSpace space;
        space.window_sizes = s.value("window_sizes", har::SearchSpace::full_grid().window_sizes);
        space.overlaps = s.value("overlaps", har::SearchSpace::full_grid().overlaps);
        space.ks = s.value("ks", har::SearchSpace::full_grid().ks);
        if (s.contains("distances")) {
            space.distances.clear();
            for (const auto& name : s["distances"])
                space.distances.push_back(parse_distance(name.get<std::string>()));
        } else {
            space.distances = har::SearchSpace::full_grid().distances;
        }
        opts.space = std::move(space);
        opts.space_overridden = true;
    }
}

// A directory is either raw recordings (*.dat) or a cache written by ingest.
std::vector<har::SensorSession> load_dataset(const std::string& dir) {
    bool has_dat = false, has_cache = false;
    if (!fs::is_directory(dir)) throw har::ConfigError("dataset directory not found: " + dir);
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        if (e.path().extension() == ".dat") has_dat = true;
        if (e.path().filename().string().rfind("session_user", 0) == 0) has_cache = true;
    }
    if (has_cache) {
        std::vector<har::SensorSession> sessions;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().filename().string().rfind("session_user", 0) == 0)
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream is(f);
            har::SensorSession s;
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(is, line)) {
                ++line_no;
                if (line.empty()) continue;
                if (line[0] == '#') {
                    const auto eq = line.find('=');
                    const std::string key = line.substr(2, eq - 2);
                    const std::string value = line.substr(eq + 1);
                    if (key == "user") s.user_id = static_cast<int>(har::parse_long(value));
                    if (key == "frequency_hz") s.frequency_hz = har::parse_double(value);
                    continue;
                }
                if (line.rfind("timestamp,", 0) == 0) continue; // header
                std::vector<std::string> fields;
                std::size_t pos = 0;
                while (true) {
                    const auto comma = line.find(',', pos);
                    fields.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                 : comma - pos));
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
                if (fields.size() != 2 + har::kChannelCount)
                    throw har::ParseError(f.filename().string(), line_no, "bad cache row");
                s.timestamps.push_back(har::parse_double(fields[0]));
                const auto act = har::activity_from_name(fields[1]);
                if (!act)
                    throw har::ParseError(f.filename().string(), line_no,
                                          "unknown activity '" + fields[1] + "'");
                s.labels.push_back(*act);
                for (std::size_t c = 0; c < har::kChannelCount; ++c)
                    s.channels[c].push_back(har::parse_double(fields[2 + c]));
            }
            sessions.push_back(std::move(s));
        }
        if (sessions.empty()) throw har::ConfigError("no cached sessions in " + dir);
        return sessions;
    }
    if (!has_dat) throw har::ConfigError("no recordings (*.dat) or session cache in " + dir);
    auto sessions = har::load_pamap2(dir);
    if (sessions.empty()) throw har::ConfigError("no recordings found in " + dir);
    for (auto& s : sessions) s = har::clean(s);
    return sessions;
}

std::vector<int> resolve_users(const Options& opts,
                               const std::vector<har::SensorSession>& sessions) {
    if (!opts.users.empty()) return opts.users;
    std::vector<int> users;
    for (const auto& s : sessions) users.push_back(s.user_id);
    return users;
}

har::Configuration base_config(const Options& opts) {
    har::Configuration c;
    c.window_size = opts.window_size;
    c.overlap = opts.overlap;
    c.k = opts.k;
    c.distance = parse_distance(opts.distance);
    c.train_hz = opts.train_hz.front();
    c.test_hz = opts.test_hz.front();
    const auto id = har::config_id_in(har::SearchSpace::full_grid(), c);
    c.config_id = id ? *id : -1;
    return c;
}

har::ReportMeta make_meta(const Options& opts, const std::vector<har::SensorSession>& sessions,
                          const std::string& command) {
    har::ReportMeta meta;
    meta.seed = opts.seed;
    meta.space_hash = opts.space.hash();
    meta.dataset_hash = har::dataset_hash(sessions);
    meta.power_watts = opts.power_watts;
    meta.command = command;
    return meta;
}

// Index-ordered parallel map; results land in input order regardless of the
// worker count.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const std::size_t count = std::min(static_cast<std::size_t>(jobs), n);
    workers.reserve(count);
    for (std::size_t w = 0; w < count; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : workers) t.join();
}

int cmd_ingest(const Options& opts) {
    auto sessions = har::load_pamap2(opts.dataset_dir);
    if (sessions.empty()) {
        std::cerr << "error: no recordings (*.dat) found in " << opts.dataset_dir << "\n";
        return kExitFailure;
    }
    fs::create_directories(opts.out_dir);

    json summary;
    summary["users"] = json::array();
    std::size_t total_samples = 0;
    std::array<std::int64_t, har::kActivityCount> activity_counts{};

    for (auto& raw : sessions) {
        const har::SensorSession session = har::clean(raw);
        total_samples += session.size();
        std::array<std::int64_t, har::kActivityCount> per_user{};
        for (har::Activity a : session.labels) {
            ++activity_counts[har::activity_index(a)];
            ++per_user[har::activity_index(a)];
        }

        const fs::path path =
            fs::path(opts.out_dir) / ("session_user" + std::to_string(session.user_id) + ".csv");
        std::ofstream os(path);
        os << "# user=" << session.user_id << '\n';
        os << "# frequency_hz=" << har::format_hz(session.frequency_hz) << '\n';
        os << "timestamp,activity";
        for (std::size_t c = 0; c < har::kChannelCount; ++c) os << ',' << har::channel_name(c);
        os << '\n';
        for (std::size_t i = 0; i < session.size(); ++i) {
            os << har::format_double(session.timestamps[i]) << ','
               << har::activity_name(session.labels[i]);
            for (std::size_t c = 0; c < har::kChannelCount; ++c)
                os << ',' << har::format_double(session.channels[c][i]);
            os << '\n';
        }

        json u;
        u["user"] = session.user_id;
        u["samples"] = session.size();
        for (std::size_t a = 0; a < har::kActivityCount; ++a)
            if (per_user[a] > 0) u["activities"][std::string(har::kActivityNames[a])] = per_user[a];
        summary["users"].push_back(u);
    }

    summary["total_samples"] = total_samples;
    std::size_t activities_present = 0;
    for (std::size_t a = 0; a < har::kActivityCount; ++a)
        if (activity_counts[a] > 0) {
            ++activities_present;
            summary["activity_counts"][std::string(har::kActivityNames[a])] = activity_counts[a];
        }
    summary["activities"] = activities_present;

    std::ofstream os(fs::path(opts.out_dir) / "summary.json");
    os << summary.dump(2) << '\n';

    std::cout << "ingested " << sessions.size() << " users, " << total_samples
              << " labeled samples, " << activities_present << " activities -> " << opts.out_dir
              << "\n";
    return kExitOk;
}

void print_result(const har::Configuration& c, const har::EvaluationResult& r) {
    std::cout << "user " << r.test_user << "  ws " << c.window_size << "  ov "
              << har::format_double(c.overlap) << "  k " << c.k << "  "
              << har::distance_name(c.distance) << "  train " << har::format_hz(c.train_hz)
              << "Hz test " << har::format_hz(c.test_hz) << "Hz | accuracy "
              << har::format_double(r.accuracy * 100.0) << "%  macro_f1 "
              << har::format_double(r.macro_f1) << "  response "
              << har::format_double(r.mean_response_ms) << "ms  energy "
              << har::format_double(r.energy_mj) << "mJ  (n_train " << r.n_train << ", n_test "
              << r.n_test << ")\n";
}

int cmd_evaluate(const Options& opts) {
    const auto sessions = load_dataset(opts.dataset_dir);
    const auto users = resolve_users(opts, sessions);
    const har::Configuration config = base_config(opts);
    const har::ConstantPowerMeter meter(opts.power_watts);
    const har::EvalOptions eval_opts{opts.max_train_instances, opts.warmup};

    std::vector<har::ResultRow> rows;
    for (int user : users) {
        const auto result = har::evaluate_config(config, sessions, user, meter,
                                                 har::derive_seed(opts.seed, user), eval_opts);
        print_result(config, result);
        rows.push_back({config, result});
    }

    fs::create_directories(opts.out_dir);
    har::write_results_csv(fs::path(opts.out_dir) / "evaluate.csv", rows,
                           make_meta(opts, sessions, "evaluate"));
    return kExitOk;
}

int cmd_sweep(const Options& opts) {
    const auto sessions = load_dataset(opts.dataset_dir);
    const auto users = resolve_users(opts, sessions);
    const auto axis = har::sweep_axis_from_name(opts.sweep_axis);
    if (!axis) throw CLI::ValidationError("--axis", "unknown sweep axis '" + opts.sweep_axis + "'");

    const har::SweepPreset preset = har::default_sweep(*axis);
    har::Configuration fixed = base_config(opts);
    // Fixed values default to the preset; explicit flags or manifest entries win.
    if (*axis != har::SweepAxis::WindowSize && !opts.window_set)
        fixed.window_size = preset.base.window_size;
    if (*axis != har::SweepAxis::Overlap && !opts.overlap_set)
        fixed.overlap = preset.base.overlap;
    if (*axis != har::SweepAxis::K && !opts.k_set) fixed.k = preset.base.k;
    const std::vector<double>& values =
        opts.sweep_values.empty() ? preset.values : opts.sweep_values;

    const har::ConstantPowerMeter meter(opts.power_watts);
    const har::EvalOptions eval_opts{opts.max_train_instances, opts.warmup};
    const har::SearchSpace id_space = har::SearchSpace::full_grid();

    std::vector<har::ResultRow> rows;
    std::ostringstream correlations;
    correlations << "user,axis,metric,pearson_r\n";
    bool any_failed = false;

    for (int user : users) {
        const auto evaluator = [&](const har::Configuration& c) {
            har::Configuration cc = c;
            const auto id = har::config_id_in(id_space, cc);
            cc.config_id = id ? *id : -1;
            return har::evaluate_config(cc, sessions, user, meter,
                                        har::derive_seed(opts.seed, user), eval_opts);
        };
        try {
            const auto outcome = har::fixed_value_sweep(*axis, values, fixed, evaluator);
            for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
            for (const auto& p : outcome.points) rows.push_back({p.config, p.result});

            const auto series = har::sweep_series(outcome);
            if (series.values.size() >= 2) {
                const auto corr_line = [&](const char* metric, const std::vector<double>& ys) {
                    try {
                        correlations << user << ',' << har::sweep_axis_name(*axis) << ','
                                     << metric << ','
                                     << har::format_double(
                                            har::pearson_correlation(series.values, ys))
                                     << '\n';
                    } catch (const har::Error&) {
                        correlations << user << ',' << har::sweep_axis_name(*axis) << ','
                                     << metric << ",\n";
                    }
                };
                corr_line("accuracy", series.accuracy);
                corr_line("response_ms", series.response_ms);
                corr_line("energy_mJ", series.energy_mj);
            }
        } catch (const har::Error& e) {
            std::cerr << "user " << user << " failed: " << e.what() << "\n";
            any_failed = true;
        }
    }

    fs::create_directories(opts.out_dir);
    const auto meta = make_meta(opts, sessions, "sweep " + std::string(opts.sweep_axis));
    har::write_results_csv(fs::path(opts.out_dir) / "sweep.csv", rows, meta);
    {
        std::ofstream os(fs::path(opts.out_dir) / "sweep_correlations.csv");
        har::write_meta(os, meta);
        os << correlations.str();
    }
    std::cout << "sweep " << opts.sweep_axis << ": " << rows.size() << " evaluations -> "
              << opts.out_dir << "\n";
    return any_failed ? kExitFailure : kExitOk;
}

int cmd_pareto(const Options& opts) {
    const auto sessions = load_dataset(opts.dataset_dir);
    const auto users = resolve_users(opts, sessions);
    const har::ConstantPowerMeter meter(opts.power_watts);
    const har::EvalOptions eval_opts{opts.max_train_instances, opts.warmup};

    std::vector<std::string> objective_names;
    std::vector<har::ObjectiveDirection> directions;
    for (const auto& name : opts.objectives) {
        if (name == "accuracy") directions.push_back(har::ObjectiveDirection::Maximize);
        else if (name == "response" || name == "energy")
            directions.push_back(har::ObjectiveDirection::Minimize);
        else
            throw CLI::ValidationError("--objectives", "unknown objective '" + name + "'");
        objective_names.push_back(name == "response" ? "mean_response_ms"
                                  : name == "energy" ? "energy_mJ"
                                                     : name);
    }

    fs::create_directories(opts.out_dir);
    const auto meta = make_meta(opts, sessions, "pareto");
    bool any_failed = false;

    for (int user : users) {
        std::map<long, har::ResultRow> evaluated_rows;
        const har::SearchEvaluator evaluator =
            [&](const har::Configuration& c) -> std::optional<std::vector<double>> {
            const auto result = har::evaluate_config(c, sessions, user, meter,
                                                     har::derive_seed(opts.seed, user), eval_opts);
            evaluated_rows[c.config_id] = {c, result};
            std::vector<double> objs;
            for (const auto& name : opts.objectives) {
                if (name == "accuracy") objs.push_back(result.accuracy);
                else if (name == "response") objs.push_back(result.mean_response_ms);
                else objs.push_back(result.energy_mj);
            }
            return objs;
        };

        try {
            const auto evaluated = har::nsga2_search(opts.space, evaluator, opts.trials,
                                                     opts.population,
                                                     har::derive_seed(opts.seed, user), directions);
            std::vector<har::ParetoPoint> points;
            points.reserve(evaluated.size());
            for (const auto& e : evaluated) points.push_back({e.config.config_id, e.objectives});
            const auto front = har::pareto_front(points, directions);

            std::vector<har::ResultRow> rows;
            rows.reserve(evaluated.size());
            for (const auto& e : evaluated) rows.push_back(evaluated_rows.at(e.config.config_id));
            const std::string suffix = "_user" + std::to_string(user);
            har::write_results_csv(fs::path(opts.out_dir) / ("evaluated" + suffix + ".csv"), rows,
                                   meta);
            {
                std::ofstream os(fs::path(opts.out_dir) / ("front" + suffix + ".csv"));
                har::write_front_csv(os, front, objective_names, meta);
            }
            {
                std::ofstream os(fs::path(opts.out_dir) / ("front" + suffix + ".json"));
                har::write_front_json(os, front, objective_names, meta);
            }
            std::cout << "user " << user << ": " << evaluated.size() << " distinct configurations, "
                      << front.size() << " on the front\n";
        } catch (const har::Error& e) {
            std::cerr << "user " << user << " failed: " << e.what() << "\n";
            any_failed = true;
        }
    }
    return any_failed ? kExitFailure : kExitOk;
}

int cmd_importance(const Options& opts) {
    const auto sessions = load_dataset(opts.dataset_dir);
    const auto users = resolve_users(opts, sessions);
    const int user = users.front();
    const har::ConstantPowerMeter meter(opts.power_watts);
    const har::EvalOptions eval_opts{opts.max_train_instances, opts.warmup};
    const har::SearchSpace& space = opts.space;

    const auto grid = har::enumerate_grid(space, opts.train_hz.front(), opts.test_hz.front());
    std::vector<har::ResultRow> rows(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for(grid.size(), opts.parallel, [&](std::size_t i) {
        try {
            rows[i] = {grid[i], har::evaluate_config(grid[i], sessions, user, meter,
                                                     har::derive_seed(opts.seed, user), eval_opts)};
        } catch (const har::Error& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!errors[i].empty())
            throw har::ConfigError("grid cell " + std::to_string(grid[i].config_id) +
                                   " failed: " + errors[i]);

    har::HyperGridMetric metric;
    metric.shape = {space.window_sizes.size(), space.overlaps.size(), space.distances.size(),
                    space.ks.size()};
    metric.values.resize(grid.size());

    const auto report_for = [&](auto select) {
        for (std::size_t i = 0; i < rows.size(); ++i) metric.values[i] = select(rows[i].result);
        return har::hyperparameter_importance(metric);
    };

    std::vector<std::pair<std::string, har::ImportanceReport>> reports;
    reports.emplace_back("accuracy",
                         report_for([](const har::EvaluationResult& r) { return r.accuracy; }));
    reports.emplace_back("response_ms", report_for([](const har::EvaluationResult& r) {
                             return r.mean_response_ms;
                         }));
    reports.emplace_back("energy_mJ",
                         report_for([](const har::EvaluationResult& r) { return r.energy_mj; }));

    fs::create_directories(opts.out_dir);
    const auto meta = make_meta(opts, sessions, "importance");
    har::write_results_csv(fs::path(opts.out_dir) / "importance_grid.csv", rows, meta);
    {
        std::ofstream os(fs::path(opts.out_dir) / "importance.csv");
        har::write_importance_csv(os, reports, meta);
    }
    {
        json j;
        j["seed"] = opts.seed;
        j["user"] = user;
        for (const auto& [name, report] : reports) {
            json r;
            r["total_variance"] = report.total_variance;
            for (std::size_t a = 0; a < har::kHyperAxisCount; ++a)
                r["main"][std::string(har::kHyperAxisNames[a])] = report.main_share[a];
            for (std::size_t p = 0; p < har::kHyperAxisPairs.size(); ++p)
                r["pairwise"][std::string(har::kHyperAxisNames[har::kHyperAxisPairs[p][0]]) + "*" +
                              std::string(har::kHyperAxisNames[har::kHyperAxisPairs[p][1]])] =
                    report.pair_share[p];
            r["residual"] = report.residual_share;
            j["metrics"][name] = r;
        }
        std::ofstream os(fs::path(opts.out_dir) / "importance.json");
        os << j.dump(2) << '\n';
    }
    std::cout << "importance over " << grid.size() << " configurations for user " << user << " -> "
              << opts.out_dir << "\n";
    return kExitOk;
}

int cmd_freq_matrix(const Options& opts) {
    const auto sessions = load_dataset(opts.dataset_dir);
    const auto users = resolve_users(opts, sessions);
    const har::Configuration config = base_config(opts);
    const har::ConstantPowerMeter meter(opts.power_watts);
    const har::EvalOptions eval_opts{opts.max_train_instances, opts.warmup};

    const auto matrices = har::frequency_matrix(
        users, opts.train_hz, opts.test_hz, config,
        [&](const har::Configuration& c, int user) {
            return har::evaluate_config(c, sessions, user, meter,
                                        har::derive_seed(opts.seed, user), eval_opts);
        });

    fs::create_directories(opts.out_dir);
    const auto meta = make_meta(opts, sessions, "freq-matrix");
    {
        std::ofstream os(fs::path(opts.out_dir) / "freq_matrix.csv");
        har::write_frequency_csv(os, matrices, meta);
    }
    {
        std::ofstream os(fs::path(opts.out_dir) / "freq_summary.csv");
        har::write_frequency_summary_csv(os, matrices, meta);
    }
    std::cout << "frequency matrix for " << users.size() << " users -> " << opts.out_dir << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    Options opts;
    CLI::App app{"kNN activity-recognition hyperparameter study"};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--dataset-dir", opts.dataset_dir, "recordings or ingest cache directory")
            ->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--seed", opts.seed, "seed for all randomness");
        cmd->add_option("--manifest", opts.manifest, "JSON manifest; overrides flags");
        cmd->add_option("--power-watts", opts.power_watts, "constant-power energy model")
            ->check(CLI::PositiveNumber);
    };
    const auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--user", opts.users, "test user(s); default: all");
        cmd->add_option("--window", opts.window_size, "window size in samples at 100 Hz")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--overlap", opts.overlap, "window overlap fraction")
            ->check(CLI::Range(0.0, 0.99));
        cmd->add_option("--k", opts.k, "number of neighbours")->check(CLI::Range(1, 1000));
        cmd->add_option("--distance", opts.distance, "euclidean|manhattan|chebyshev");
        cmd->add_option("--train-hz", opts.train_hz, "training sampling frequency (Hz)");
        cmd->add_option("--test-hz", opts.test_hz, "test sampling frequency (Hz)");
        cmd->add_option("--max-instances", opts.max_train_instances,
                        "training instance cap (stratified)");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "parse, clean and cache recordings");
    ingest->add_option("--dataset-dir", opts.dataset_dir, "raw recordings directory")->required();
    ingest->add_option("--out", opts.out_dir, "cache output directory");

    CLI::App* evaluate = app.add_subcommand("evaluate", "run one configuration under LOSO");
    add_common(evaluate);
    add_config(evaluate);

    CLI::App* sweep = app.add_subcommand("sweep", "vary one hyperparameter, fix the rest");
    add_common(sweep);
    add_config(sweep);
    sweep->add_option("--axis", opts.sweep_axis, "window_size|overlap|k");
    sweep->add_option("--values", opts.sweep_values, "swept values (default: preset)");

    CLI::App* pareto = app.add_subcommand("pareto", "NSGA-II search and Pareto front per user");
    add_common(pareto);
    add_config(pareto);
    pareto->add_option("--trials", opts.trials, "search trials")->check(CLI::PositiveNumber);
    pareto->add_option("--population", opts.population, "NSGA-II population")
        ->check(CLI::Range(4, 100000));
    pareto->add_option("--objectives", opts.objectives, "accuracy|response|energy (2 or 3)");

    CLI::App* importance = app.add_subcommand("importance", "grid ANOVA importance for one user");
    add_common(importance);
    add_config(importance);
    importance->add_option("--parallel", opts.parallel,
                           "evaluation workers (timings lose comparability when > 1)");

    CLI::App* freq = app.add_subcommand("freq-matrix", "train/test frequency accuracy matrix");
    add_common(freq);
    add_config(freq);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    for (const CLI::App* sub : app.get_subcommands()) {
        const auto was_set = [&](const std::string& name) {
            const auto* opt = sub->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        opts.window_set = opts.window_set || was_set("--window");
        opts.overlap_set = opts.overlap_set || was_set("--overlap");
        opts.k_set = opts.k_set || was_set("--k");
    }

    try {
        if (!opts.manifest.empty()) apply_manifest(opts);
        if (opts.objectives.size() < 2 || opts.objectives.size() > 3)
            throw CLI::ValidationError("--objectives", "need 2 or 3 objectives");

        if (ingest->parsed()) return cmd_ingest(opts);
        if (evaluate->parsed()) return cmd_evaluate(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (pareto->parsed()) return cmd_pareto(opts);
        if (importance->parsed()) return cmd_importance(opts);
        if (freq->parsed()) return cmd_freq_matrix(opts);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const har::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
