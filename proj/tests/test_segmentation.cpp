#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "har/segmentation.hpp"
#include "testutil.hpp"

using namespace har;

TEST_CASE("window_plan basic placements") {
    CHECK(window_plan(1000, {500, 0.5}) == std::vector<std::size_t>{0, 250, 500});
    CHECK(window_plan(50, {50, 0.0}) == std::vector<std::size_t>{0});
    CHECK(window_plan(49, {50, 0.0}).empty());
    CHECK(window_plan(0, {50, 0.0}).empty());
}

TEST_CASE("window_plan count equals brute-force enumeration on the search grid") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> lengths(0, 10000);
    for (int ws = 50; ws <= 900; ws += 50) {
        for (int ov = 0; ov <= 9; ++ov) {
            const WindowSpec spec{static_cast<std::size_t>(ws), ov / 10.0};
            for (int trial = 0; trial < 20; ++trial) {
                const std::size_t len = lengths(rng);
                const auto plan = window_plan(len, spec);
                CHECK(plan.size() == testutil::window_count_oracle(len, spec.size, spec.step()));
                if (len >= spec.size)
                    CHECK(plan.size() == (len - spec.size) / spec.step() + 1);
            }
        }
    }
}

TEST_CASE("grid overlaps produce exact integer steps") {
    CHECK(WindowSpec{500, 0.3}.step() == 350); // 500 * 0.7
    CHECK(WindowSpec{900, 0.7}.step() == 270);
    CHECK(WindowSpec{50, 0.9}.step() == 5);
    CHECK(WindowSpec{3, 0.9}.step() == 1); // clamped from floor(0.3)
}

TEST_CASE("consecutive windows overlap by size minus step") {
    const WindowSpec spec{100, 0.35};
    const auto plan = window_plan(1000, spec);
    REQUIRE(plan.size() >= 2);
    for (std::size_t i = 1; i < plan.size(); ++i) {
        const std::size_t shared = plan[i - 1] + spec.size - plan[i];
        CHECK(shared == spec.size - spec.step());
    }
}

TEST_CASE("segment confines windows to single-activity runs") {
    // Two runs: 100 samples of walking, 120 of running.
    const auto session = testutil::make_session(
        1, {{Activity::Walking, 100}, {Activity::Running, 120}}, 100.0, 3);

    const auto windows = segment(session, {50, 0.0});
    CHECK(windows.size() == 4); // 2 + 2

    for (const auto& w : windows) {
        for (std::size_t i = w.start; i < w.start + w.size; ++i)
            CHECK(session.labels[i] == w.activity);
    }

    SECTION("a run shorter than the window contributes nothing") {
        const auto s2 = testutil::make_session(
            1, {{Activity::Walking, 30}, {Activity::Running, 60}}, 100.0, 3);
        const auto win = segment(s2, {50, 0.0});
        REQUIRE(win.size() == 1);
        CHECK(win[0].activity == Activity::Running);
    }
    SECTION("windows never straddle an activity boundary even with overlap") {
        const auto win = segment(session, {60, 0.9});
        for (const auto& w : win) {
            CHECK(session.labels[w.start] == session.labels[w.start + w.size - 1]);
            CHECK(session.labels[w.start] == w.activity);
        }
    }
}

namespace {

std::vector<Window> toy_windows(const SensorSession& session, std::size_t count_a,
                                std::size_t count_b) {
    // Fabricated window list over one session; starts are just tags here.
    std::vector<Window> windows;
    for (std::size_t i = 0; i < count_a; ++i)
        windows.push_back({&session, i * 10, 5, Activity::AscendingStairs, 1});
    for (std::size_t i = 0; i < count_b; ++i)
        windows.push_back({&session, i * 10, 5, Activity::Cycling, 1});
    return windows;
}

ActivityDistribution two_class_reference(double pa, double pb) {
    ActivityDistribution ref{};
    ref[activity_index(Activity::AscendingStairs)] = pa;
    ref[activity_index(Activity::Cycling)] = pb;
    return ref;
}

} // namespace

TEST_CASE("cap_instances follows largest-remainder apportionment") {
    const auto session = testutil::make_session(1, {{Activity::Walking, 10}}, 100.0, 1);
    const auto windows = toy_windows(session, 6, 4);

    const auto capped = cap_instances(windows, 5, two_class_reference(0.6, 0.4), 99);
    REQUIRE(capped.size() == 5);
    std::size_t a = 0, b = 0;
    for (const auto& w : capped) (w.activity == Activity::AscendingStairs ? a : b)++;
    CHECK(a == 3);
    CHECK(b == 2);
}

TEST_CASE("cap_instances is the identity when the target covers everything") {
    const auto session = testutil::make_session(1, {{Activity::Walking, 10}}, 100.0, 1);
    const auto windows = toy_windows(session, 3, 2);
    CHECK(cap_instances(windows, 5, two_class_reference(0.6, 0.4), 1).size() == 5);
    CHECK(cap_instances(windows, 50, two_class_reference(0.6, 0.4), 1).size() == 5);
}

TEST_CASE("cap_instances names a missing required activity") {
    const auto session = testutil::make_session(1, {{Activity::Walking, 10}}, 100.0, 1);
    const auto windows = toy_windows(session, 6, 0); // no cycling windows
    try {
        cap_instances(windows, 3, two_class_reference(0.6, 0.4), 1);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cycling") != std::string::npos);
    }
}

TEST_CASE("cap_instances is deterministic and order-independent") {
    const auto session = testutil::make_session(1, {{Activity::Walking, 10}}, 100.0, 1);
    auto windows = toy_windows(session, 40, 60);

    const auto pick = [](const std::vector<Window>& ws) {
        std::vector<std::pair<int, std::size_t>> keys;
        for (const auto& w : ws) keys.emplace_back(static_cast<int>(w.activity), w.start);
        return keys;
    };

    const auto first = cap_instances(windows, 20, two_class_reference(0.4, 0.6), 7);
    std::mt19937_64 rng(5);
    std::shuffle(windows.begin(), windows.end(), rng);
    const auto second = cap_instances(windows, 20, two_class_reference(0.4, 0.6), 7);

    CHECK(pick(first) == pick(second));
    CHECK(first.size() == 20);

    const auto other_seed = cap_instances(windows, 20, two_class_reference(0.4, 0.6), 8);
    CHECK(other_seed.size() == 20);
}

TEST_CASE("cap_instances redistributes when one activity runs short") {
    const auto session = testutil::make_session(1, {{Activity::Walking, 10}}, 100.0, 1);
    // Reference wants 8 ascending but only 3 exist: the shortfall moves to cycling.
    const auto windows = toy_windows(session, 3, 20);
    const auto capped = cap_instances(windows, 10, two_class_reference(0.8, 0.2), 1);
    REQUIRE(capped.size() == 10);
    std::size_t a = 0, b = 0;
    for (const auto& w : capped) (w.activity == Activity::AscendingStairs ? a : b)++;
    CHECK(a == 3);
    CHECK(b == 7);
}

TEST_CASE("cap_instances validates its inputs") {
    const auto session = testutil::make_session(1, {{Activity::Walking, 10}}, 100.0, 1);
    const auto windows = toy_windows(session, 6, 6);
    CHECK_THROWS_AS(cap_instances(windows, 1, two_class_reference(0.6, 0.4), 1), ConfigError);
    CHECK_THROWS_AS(cap_instances(windows, 5, two_class_reference(0.6, 0.6), 1), ConfigError);
}
