#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "har/metrics.hpp"
#include "har/timing.hpp"

using namespace har;

TEST_CASE("f1 on a diagonal matrix is 1 everywhere") {
    ConfusionMatrix cm(3);
    cm.at(0, 0) = 4;
    cm.at(1, 1) = 2;
    cm.at(2, 2) = 9;
    const auto report = f1_scores(cm);
    CHECK(report.accuracy == 1.0);
    CHECK(report.macro_f1 == 1.0);
    for (const auto& s : report.per_class) {
        CHECK(s.defined);
        CHECK(s.f1 == 1.0);
    }
}

TEST_CASE("f1 with TP 8, FP 2, FN 2 is 0.8") {
    ConfusionMatrix cm(2);
    cm.at(0, 0) = 8;
    cm.at(0, 1) = 2; // missed
    cm.at(1, 0) = 2; // false alarms
    cm.at(1, 1) = 5;
    const auto report = f1_scores(cm);
    CHECK(report.per_class[0].precision == 0.8);
    CHECK(report.per_class[0].recall == 0.8);
    CHECK(report.per_class[0].f1 == Catch::Approx(0.8).margin(1e-15));
}

TEST_CASE("class absent from truth and predictions is excluded") {
    ConfusionMatrix cm(3);
    cm.at(0, 0) = 5;
    cm.at(1, 1) = 5;
    const auto report = f1_scores(cm);
    CHECK_FALSE(report.per_class[2].defined);
    CHECK(report.macro_f1 == 1.0);
}

TEST_CASE("a present but never-predicted class scores 0 and drags the macro") {
    ConfusionMatrix cm(2);
    cm.at(0, 0) = 10;
    cm.at(1, 0) = 4; // class 1 always misread as class 0
    const auto report = f1_scores(cm);
    CHECK(report.per_class[1].defined);
    CHECK(report.per_class[1].f1 == 0.0);
    CHECK(report.macro_f1 < 0.5);
}

TEST_CASE("accuracy equals trace over total and the recall identity holds") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> count(0, 20);
    for (int trial = 0; trial < 50; ++trial) {
        ConfusionMatrix cm(5);
        for (std::size_t t = 0; t < 5; ++t)
            for (std::size_t p = 0; p < 5; ++p) cm.at(t, p) = count(rng);
        if (cm.total() == 0) continue;
        const auto report = f1_scores(cm);
        CHECK(report.accuracy ==
              static_cast<double>(cm.trace()) / static_cast<double>(cm.total()));

        // sum over classes of recall * class share == accuracy
        double weighted = 0.0;
        for (std::size_t c = 0; c < 5; ++c)
            weighted += report.per_class[c].recall *
                        (static_cast<double>(report.per_class[c].support) /
                         static_cast<double>(cm.total()));
        CHECK(weighted == Catch::Approx(report.accuracy).margin(1e-12));
    }
}

TEST_CASE("pearson correlation") {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> ys;

    SECTION("perfect linear") {
        for (double x : xs) ys.push_back(2.0 * x);
        CHECK(pearson_correlation(xs, ys) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("perfect inverse") {
        for (double x : xs) ys.push_back(-x);
        CHECK(pearson_correlation(xs, ys) == Catch::Approx(-1.0).margin(1e-12));
    }
    SECTION("constant input is an error") {
        ys = {5.0, 5.0, 5.0, 5.0};
        CHECK_THROWS_AS(pearson_correlation(xs, ys), ConfigError);
        CHECK_THROWS_AS(pearson_correlation(ys, xs), ConfigError);
    }
    SECTION("length checks") {
        ys = {1.0};
        CHECK_THROWS_AS(pearson_correlation(xs, ys), ConfigError);
        CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1.0}, std::vector<double>{2.0}),
                        ConfigError);
    }
    SECTION("affine images of random data") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> values(-100.0, 100.0);
        std::vector<double> r(16);
        for (auto& v : r) v = values(rng);
        std::vector<double> up, down;
        for (double v : r) {
            up.push_back(3.5 * v + 11.0);
            down.push_back(-0.25 * v + 2.0);
        }
        CHECK(pearson_correlation(r, up) == Catch::Approx(1.0).margin(1e-9));
        CHECK(pearson_correlation(r, down) == Catch::Approx(-1.0).margin(1e-9));
    }
}

TEST_CASE("constant power meter is exact multiplication") {
    const ConstantPowerMeter meter(1.925);
    CHECK(estimate_energy(38.04, meter) == Catch::Approx(73.23).margin(0.005));
    CHECK(estimate_energy(38.04, meter) == 1.925 * 38.04);
    CHECK(estimate_energy(0.0, meter) == 0.0);

    const ConstantPowerMeter low(1.762);
    CHECK(estimate_energy(12.99, low) == Catch::Approx(22.89).margin(0.005));

    CHECK_THROWS_AS(ConstantPowerMeter(0.0), ConfigError);
    CHECK_THROWS_AS(ConstantPowerMeter(-1.0), ConfigError);
}

TEST_CASE("energy over time recovers the configured power exactly") {
    const ConstantPowerMeter meter(1.9);
    for (double ms : {0.001, 0.5, 7.25, 38.04, 5000.0})
        CHECK(estimate_energy(ms, meter) / ms == 1.9);
}

TEST_CASE("measure_response accounting") {
    std::size_t calls = 0;
    const auto stats = measure_response(
        25, 10, [&](std::size_t) { ++calls; }, [](std::size_t) {}, [](std::size_t) {});
    CHECK(calls == 25);
    CHECK(stats.inferences == 25);
    CHECK(stats.warmup == 10);
    CHECK(stats.measured == 15);
    CHECK(stats.mean_total_ms >= 0.0);
    CHECK(stats.mean_total_ms ==
          stats.mean_read_ms + stats.mean_extract_ms + stats.mean_infer_ms);
}

TEST_CASE("measure_response with fewer items than warmup measures them all") {
    const auto stats = measure_response(
        4, 10, [](std::size_t) {}, [](std::size_t) {}, [](std::size_t) {});
    CHECK(stats.warmup == 0);
    CHECK(stats.measured == 4);
}

TEST_CASE("measure_response needs work to measure") {
    CHECK_THROWS_AS(measure_response(
                        0, 0, [](std::size_t) {}, [](std::size_t) {}, [](std::size_t) {}),
                    ConfigError);
}

TEST_CASE("prepare stage runs outside the measurement") {
    std::size_t prepared = 0;
    const auto stats = measure_response(
        5, 0, [](std::size_t) {}, [](std::size_t) {}, [](std::size_t) {},
        [&](std::size_t i) { prepared += i + 1; });
    CHECK(prepared == 15);
    CHECK(stats.measured == 5);
}
