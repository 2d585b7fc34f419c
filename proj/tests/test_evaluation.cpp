#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "har/evaluation.hpp"
#include "testutil.hpp"

using namespace har;

namespace {

Configuration small_config() {
    Configuration c;
    c.window_size = 100;
    c.overlap = 0.5;
    c.k = 3;
    c.distance = Distance::Euclidean;
    c.config_id = 7;
    return c;
}

const std::vector<Activity> kFourActivities = {Activity::Lying, Activity::Walking,
                                               Activity::Running, Activity::Cycling};

} // namespace

TEST_CASE("separable synthetic data is classified perfectly") {
    const auto sessions = testutil::make_dataset(3, kFourActivities, 400, 100.0, 17);
    const ConstantPowerMeter meter(1.9);
    const auto result = evaluate_config(small_config(), sessions, 2, meter, 5);

    CHECK(result.accuracy == 1.0);
    CHECK(result.macro_f1 == 1.0);
    CHECK(result.test_user == 2);
    CHECK(result.config_id == 7);
    CHECK(result.n_test > 0);
    CHECK(result.n_train > 0);
    for (Activity a : kFourActivities)
        CHECK(result.f1_per_activity[activity_index(a)] == 1.0);
    CHECK(std::isnan(result.f1_per_activity[activity_index(Activity::Ironing)]));
}

TEST_CASE("accuracy equals the confusion-matrix trace over its total") {
    const auto sessions = testutil::make_dataset(3, kFourActivities, 300, 100.0, 23);
    const ConstantPowerMeter meter(1.9);
    const auto result = evaluate_config(small_config(), sessions, 1, meter, 5);
    REQUIRE(result.confusion.total() == static_cast<std::int64_t>(result.n_test));
    CHECK(result.accuracy == static_cast<double>(result.confusion.trace()) /
                                 static_cast<double>(result.confusion.total()));
}

TEST_CASE("evaluation is deterministic in accuracy and F1") {
    const auto sessions = testutil::make_dataset(3, kFourActivities, 300, 100.0, 29);
    const ConstantPowerMeter meter(1.9);
    EvalOptions opts;
    opts.max_train_instances = 16; // force the seeded sampler to matter

    const auto a = evaluate_config(small_config(), sessions, 3, meter, 42, opts);
    const auto b = evaluate_config(small_config(), sessions, 3, meter, 42, opts);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.macro_f1 == b.macro_f1);
    for (std::size_t i = 0; i < kActivityCount; ++i) {
        const bool both_nan =
            std::isnan(a.f1_per_activity[i]) && std::isnan(b.f1_per_activity[i]);
        CHECK((both_nan || a.f1_per_activity[i] == b.f1_per_activity[i]));
    }
    CHECK(a.n_train == b.n_train);
    CHECK(a.n_test == b.n_test);
}

TEST_CASE("energy is exactly power times response time") {
    const auto sessions = testutil::make_dataset(3, kFourActivities, 300, 100.0, 31);
    const ConstantPowerMeter meter(2.5);
    const auto result = evaluate_config(small_config(), sessions, 1, meter, 1);
    CHECK(result.energy_mj == 2.5 * result.mean_response_ms);
    CHECK(result.mean_response_ms > 0.0);
    CHECK(result.read_ms + result.extract_ms + result.infer_ms == result.mean_response_ms);
}

TEST_CASE("the training cap is honored with a stratified mix") {
    const auto sessions = testutil::make_dataset(3, kFourActivities, 400, 100.0, 37);
    const ConstantPowerMeter meter(1.9);
    EvalOptions opts;
    opts.max_train_instances = 20;

    const auto result = evaluate_config(small_config(), sessions, 1, meter, 9, opts);
    CHECK(result.n_train == 20);
    // equal run lengths: 4 activities x 5 windows each, within one window
    CHECK(result.accuracy > 0.9);
}

TEST_CASE("a window larger than every test run is an error") {
    std::vector<SensorSession> sessions;
    sessions.push_back(testutil::make_session(1, {{Activity::Walking, 600}}, 100.0, 1));
    sessions.push_back(testutil::make_session(2, {{Activity::Walking, 600}}, 100.0, 2));
    sessions.push_back(testutil::make_session(3, {{Activity::Walking, 90}}, 100.0, 3));

    Configuration c = small_config();
    c.window_size = 200;
    const ConstantPowerMeter meter(1.9);
    try {
        evaluate_config(c, sessions, 3, meter, 1);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("no instances") != std::string::npos);
    }
}

TEST_CASE("k larger than the stored instances is rejected") {
    const auto sessions = testutil::make_dataset(3, {Activity::Walking, Activity::Running}, 200,
                                                 100.0, 3);
    Configuration c = small_config();
    c.window_size = 150;
    c.overlap = 0.0;
    c.k = 500;
    const ConstantPowerMeter meter(1.9);
    CHECK_THROWS_AS(evaluate_config(c, sessions, 1, meter, 1), ConfigError);
}

TEST_CASE("window rescaling preserves duration across frequencies") {
    CHECK(rescaled_window_samples(900, 100.0) == 900);
    CHECK(rescaled_window_samples(900, 50.0) == 450);
    CHECK(rescaled_window_samples(900, 12.5) == 113); // 112.5 rounds up
    CHECK(rescaled_window_samples(900, 1.0) == 9);
    CHECK(rescaled_window_samples(50, 1.0) == 1);

    CHECK(window_valid_at(900, 0.0, 1.0));
    CHECK_FALSE(window_valid_at(50, 0.0, 1.0));   // below 2 samples
    CHECK_FALSE(window_valid_at(200, 0.6, 1.0));  // step floor(2 * 0.4) = 0
    CHECK(window_valid_at(200, 0.5, 1.0));        // step exactly 1
}

TEST_CASE("invalid rescaled configurations are rejected up front") {
    const auto sessions = testutil::make_dataset(3, kFourActivities, 400, 100.0, 11);
    Configuration c = small_config();
    c.window_size = 50;
    c.test_hz = 1.0;
    const ConstantPowerMeter meter(1.9);
    CHECK_THROWS_AS(evaluate_config(c, sessions, 1, meter, 1), ConfigError);
}

TEST_CASE("downsampled evaluation still separates the classes") {
    const auto sessions = testutil::make_dataset(3, kFourActivities, 800, 100.0, 41);
    Configuration c = small_config();
    c.window_size = 200;
    c.train_hz = 50.0;
    c.test_hz = 50.0;
    const ConstantPowerMeter meter(1.9);
    const auto result = evaluate_config(c, sessions, 2, meter, 5);
    CHECK(result.accuracy > 0.9);
    CHECK(result.n_test > 0);
}

TEST_CASE("the streamed read path predicts exactly like direct extraction") {
    // The measured loop parses window rows from text; the shortest round-trip
    // rendering must make that path bit-identical to extracting straight from
    // the session arrays.
    const auto sessions = testutil::make_dataset(3, kFourActivities, 500, 100.0, 53, 0.01);
    const ConstantPowerMeter meter(1.9);
    const Configuration c = small_config();
    const std::uint64_t seed = 13;
    EvalOptions opts;
    opts.max_train_instances = 40;

    const auto result = evaluate_config(c, sessions, 2, meter, seed, opts);

    // Independent replay of the pipeline without the text stream.
    const auto split = split_loso(sessions, 2);
    ActivityDistribution reference{};
    {
        std::vector<Activity> labels;
        for (const auto* s : split.train)
            labels.insert(labels.end(), s->labels.begin(), s->labels.end());
        reference = label_distribution(labels);
    }
    const WindowSpec spec{static_cast<std::size_t>(c.window_size), c.overlap};
    const auto train_windows =
        segment(std::span<const SensorSession* const>(split.train), spec);
    const auto capped = cap_instances(train_windows, opts.max_train_instances, reference, seed);
    std::vector<FeatureVector> train_vectors;
    for (const auto& w : capped) train_vectors.push_back(extract_features(w));
    const auto norm = fit_normalizer(train_vectors);
    for (auto& fv : train_vectors) normalize_in_place(fv.values, norm);
    const auto model = KnnModel::build(train_vectors, opts.max_train_instances, c.distance);

    const auto test_windows = segment(*split.test, spec);
    REQUIRE(test_windows.size() == result.n_test);
    std::size_t correct = 0;
    for (const auto& w : test_windows) {
        auto fv = extract_features(w);
        normalize_in_place(fv.values, norm);
        if (model.predict(fv.values, static_cast<std::size_t>(c.k)) == w.activity) ++correct;
    }
    CHECK(result.accuracy ==
          static_cast<double>(correct) / static_cast<double>(test_windows.size()));
}

TEST_CASE("overlapping classes yield imperfect but consistent scores") {
    // Class offsets near the noise floor: the classifier has to make mistakes.
    const auto sessions = testutil::make_dataset(3, kFourActivities, 600, 100.0, 47, 0.01);
    const ConstantPowerMeter meter(1.9);
    Configuration c = small_config();
    c.window_size = 30;
    const auto result = evaluate_config(c, sessions, 2, meter, 5);

    CHECK(result.accuracy > 0.0);
    CHECK(result.accuracy < 1.0);
    CHECK(result.macro_f1 > 0.0);
    CHECK(result.macro_f1 < 1.0);

    // weighted recall identity against the returned confusion counts
    const auto f1 = f1_scores(result.confusion);
    double weighted = 0.0;
    for (std::size_t i = 0; i < kActivityCount; ++i)
        weighted += f1.per_class[i].recall * (static_cast<double>(f1.per_class[i].support) /
                                              static_cast<double>(result.confusion.total()));
    CHECK(weighted == Catch::Approx(result.accuracy).margin(1e-12));
}

TEST_CASE("train and test frequencies may differ") {
    const auto sessions = testutil::make_dataset(3, kFourActivities, 800, 100.0, 43);
    Configuration c = small_config();
    c.window_size = 200;
    c.train_hz = 100.0;
    c.test_hz = 25.0;
    const ConstantPowerMeter meter(1.9);
    const auto result = evaluate_config(c, sessions, 1, meter, 5);
    CHECK(result.n_test > 0);
    CHECK(result.accuracy >= 0.0);
    CHECK(result.accuracy <= 1.0);
}
