#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "har/features.hpp"
#include "testutil.hpp"

using namespace har;

namespace {

// Per sensor: x = (1,2,3), y = (2,4,6), z = (5,5,5), each channel shifted by
// its channel index. Every statistic is an exact small rational, so the
// expected vector is hand-computable and must match bit for bit.
SensorSession golden_session() {
    SensorSession s;
    s.user_id = 4;
    s.frequency_hz = 100.0;
    s.timestamps = {0.0, 0.01, 0.02};
    s.labels = {Activity::Running, Activity::Running, Activity::Running};
    const double base[3][3] = {{1, 2, 3}, {2, 4, 6}, {5, 5, 5}};
    for (std::size_t c = 0; c < kChannelCount; ++c)
        for (std::size_t i = 0; i < 3; ++i)
            s.channels[c].push_back(base[c % 3][i] + static_cast<double>(c));
    return s;
}

Window whole_window(const SensorSession& s) {
    return Window{&s, 0, s.size(), s.labels[0], s.user_id};
}

} // namespace

TEST_CASE("golden window: all 90 features match the hand-computed values") {
    const auto session = golden_session();
    const auto fv = extract_features(whole_window(session));

    REQUIRE(fv.values.size() == kFeatureCount);
    CHECK(fv.label == Activity::Running);
    CHECK(fv.user_id == 4);

    for (std::size_t sensor = 0; sensor < 9; ++sensor) {
        const double off = 3.0 * static_cast<double>(sensor);
        const double* f = fv.values.data() + sensor * kFeaturesPerSensor;
        CHECK(f[0] == 2.0 + off);  // mean_x
        CHECK(f[1] == 5.0 + off);  // mean_y (shift +1)
        CHECK(f[2] == 7.0 + off);  // mean_z (shift +2)
        CHECK(f[3] == 14.0 + 3.0 * off); // mean of the summed axes
        CHECK(f[4] == 1.0);        // std_x
        CHECK(f[5] == 2.0);        // std_y
        CHECK(f[6] == 0.0);        // std_z (constant)
        CHECK(f[7] == 1.0);        // corr(x, y): y is 2x shifted
        CHECK(f[8] == 0.0);        // corr with a constant axis
        CHECK(f[9] == 0.0);
    }
}

TEST_CASE("feature extraction is bit-stable across repeated runs") {
    const auto session = golden_session();
    const auto a = extract_features(whole_window(session));
    const auto b = extract_features(whole_window(session));
    CHECK(a.values == b.values);
}

TEST_CASE("constant window degenerates cleanly") {
    SensorSession s;
    s.user_id = 1;
    s.frequency_hz = 100.0;
    for (std::size_t i = 0; i < 5; ++i) {
        s.timestamps.push_back(0.01 * static_cast<double>(i));
        s.labels.push_back(Activity::Sitting);
        for (std::size_t c = 0; c < kChannelCount; ++c) s.channels[c].push_back(3.25);
    }
    const auto fv = extract_features(whole_window(s));
    for (std::size_t sensor = 0; sensor < 9; ++sensor) {
        const double* f = fv.values.data() + sensor * kFeaturesPerSensor;
        CHECK(f[0] == 3.25);
        CHECK(f[3] == 9.75);
        for (int i = 4; i < 10; ++i) CHECK(f[i] == 0.0);
    }
}

TEST_CASE("windows below two samples are rejected") {
    auto s = golden_session();
    const Window w{&s, 0, 1, Activity::Running, 4};
    CHECK_THROWS_AS(extract_features(w), ConfigError);
}

TEST_CASE("adding a constant shifts means and leaves std and corr alone") {
    const auto session = testutil::make_session(2, {{Activity::Cycling, 64}}, 100.0, 13);
    const auto before = extract_features(whole_window(session));

    auto shifted = session;
    const double c = 17.5;
    const std::size_t axis = 7; // one gyro axis
    for (double& v : shifted.channels[axis]) v += c;
    const auto after = extract_features(whole_window(shifted));

    for (std::size_t sensor = 0; sensor < 9; ++sensor) {
        for (std::size_t k = 0; k < kFeaturesPerSensor; ++k) {
            const std::size_t d = sensor * kFeaturesPerSensor + k;
            const bool mean_of_shifted_axis =
                (sensor == axis / 3) && (k == axis % 3 || k == 3);
            if (mean_of_shifted_axis)
                CHECK(after.values[d] == Catch::Approx(before.values[d] + c).margin(1e-9));
            else
                CHECK(after.values[d] == Catch::Approx(before.values[d]).margin(1e-9));
        }
    }
}

TEST_CASE("correlations stay in [-1, 1] and a duplicated axis correlates at 1") {
    auto session = testutil::make_session(3, {{Activity::Walking, 128}}, 100.0, 5);
    session.channels[1] = session.channels[0]; // y := x for the wrist accelerometer
    const auto fv = extract_features(whole_window(session));
    CHECK(fv.values[7] == Catch::Approx(1.0).margin(1e-12));
    for (std::size_t sensor = 0; sensor < 9; ++sensor)
        for (std::size_t k = 7; k < 10; ++k) {
            const double v = fv.values[sensor * kFeaturesPerSensor + k];
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
}

TEST_CASE("normalizer fit and application") {
    std::vector<FeatureVector> train(3);
    for (std::size_t i = 0; i < 3; ++i) train[i].values.fill(static_cast<double>(2 * (i + 1)));
    const auto norm = fit_normalizer(train);
    CHECK(norm.min[0] == 2.0);
    CHECK(norm.max[0] == 6.0);

    FeatureVector probe;
    probe.values.fill(5.0);
    CHECK(normalize(probe, norm).values[0] == 0.75);

    probe.values.fill(2.0);
    CHECK(normalize(probe, norm).values[0] == 0.0);
    probe.values.fill(6.0);
    CHECK(normalize(probe, norm).values[0] == 1.0);
    probe.values.fill(9.0); // above the training max: clamped
    CHECK(normalize(probe, norm).values[0] == 1.0);
    probe.values.fill(-1.0);
    CHECK(normalize(probe, norm).values[0] == 0.0);
}

TEST_CASE("degenerate dimensions map to zero") {
    std::vector<FeatureVector> train(2);
    train[0].values.fill(4.0);
    train[1].values.fill(4.0);
    const auto norm = fit_normalizer(train);
    FeatureVector probe;
    probe.values.fill(123.0);
    CHECK(normalize(probe, norm).values[17] == 0.0);
}

TEST_CASE("normalizing the training set itself attains both endpoints") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> values(-10.0, 10.0);
    std::vector<FeatureVector> train(40);
    for (auto& fv : train)
        for (double& v : fv.values) v = values(rng);

    const auto norm = fit_normalizer(train);
    std::array<double, kFeatureCount> lo{}, hi{};
    lo.fill(2.0);
    hi.fill(-1.0);
    for (auto fv : train) {
        normalize_in_place(fv.values, norm);
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            CHECK(fv.values[d] >= 0.0);
            CHECK(fv.values[d] <= 1.0);
            lo[d] = std::min(lo[d], fv.values[d]);
            hi[d] = std::max(hi[d], fv.values[d]);
        }
    }
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
        CHECK(lo[d] == 0.0);
        CHECK(hi[d] == 1.0);
    }
}

TEST_CASE("empty training set cannot fit a normalizer") {
    CHECK_THROWS_AS(fit_normalizer({}), ConfigError);
}

TEST_CASE("feature CSV has 92 columns and one row per vector") {
    const auto session = golden_session();
    const std::vector<FeatureVector> vectors = {extract_features(whole_window(session))};
    std::ostringstream os;
    write_features_csv(os, vectors);

    std::istringstream is(os.str());
    std::string header, row, extra;
    REQUIRE(std::getline(is, header));
    REQUIRE(std::getline(is, row));
    CHECK_FALSE(std::getline(is, extra));
    CHECK(std::count(header.begin(), header.end(), ',') == 91);
    CHECK(std::count(row.begin(), row.end(), ',') == 91);
    CHECK(header.find("wrist_acc_mean_x") == 0);
    CHECK(row.find(",running,4") != std::string::npos);
}
