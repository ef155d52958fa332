#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "evplan/dataset.hpp"
#include "evplan/siting.hpp"

using namespace evplan;

namespace {

/// Four-bus toy feeder: 1 -- 2 -- 3 with a spur 2 -- 4.
FeederNetwork four_bus() {
    return FeederNetwork(12.66, 100.0,
                         {{1, 0, 0}, {2, 200, 100}, {3, 150, 80}, {4, 100, 40}},
                         {{1, 1, 2, 0.30, 0.20}, {2, 2, 3, 0.40, 0.25}, {3, 2, 4, 0.25, 0.15}});
}

PsoConfig quick_cfg(std::uint64_t seed) {
    PsoConfig cfg;
    cfg.swarm_size = 20;
    cfg.max_iter = 60;
    cfg.max_run = 4;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("particle step") {
    PsoConfig cfg;
    std::mt19937_64 rng(1);

    SECTION("fixed point: zero velocity at pbest == leader") {
        Particle p;
        p.position = {5, 9, 12};
        p.velocity = {0, 0, 0};
        p.pbest_position = p.position;
        step(p, p.position, cfg, 33, rng);
        CHECK(p.position == std::vector<double>{5, 9, 12});
        CHECK(p.velocity == std::vector<double>{0, 0, 0});
    }
    SECTION("rounding: 17.6 decodes to bus 18") {
        std::vector<double> pos{17.6, 3.2, 30.9};
        detail::repair_position(pos, 33);
        CHECK(pos == std::vector<double>{18, 3, 31});
    }
    SECTION("duplicates move to the nearest unused bus") {
        std::vector<double> pos{8, 8, 15, 16, 17};
        detail::repair_position(pos, 33);
        std::set<double> distinct(pos.begin(), pos.end());
        CHECK(distinct.size() == 5);
        CHECK(pos[0] == 8);
        CHECK(pos[1] == 7);  // 7 and 9 equidistant; ties prefer the lower id
    }
    SECTION("clamping keeps coordinates in [2, n_bus]") {
        std::vector<double> pos{-4.2, 55.0, 1.2};
        detail::repair_position(pos, 33);
        for (double c : pos) {
            CHECK(c >= 2);
            CHECK(c <= 33);
        }
    }
    SECTION("repair totality under random velocities") {
        std::uniform_real_distribution<double> vel(-40, 40);
        std::uniform_real_distribution<double> coord(-10, 45);
        for (int round = 0; round < 500; ++round) {
            Particle p;
            for (int d = 0; d < 5; ++d) {
                p.position.push_back(coord(rng));
                p.velocity.push_back(vel(rng));
                p.pbest_position.push_back(coord(rng));
            }
            std::vector<double> leader{2, 9, 17, 25, 33};
            step(p, leader, cfg, 33, rng);
            auto locs = detail::decode_position(p.position);
            Placement pl(locs, 1000.0);  // throws if invalid
            CHECK(pl.size() == 5);
            for (double v : p.velocity) {
                CHECK(v <= 31.0);
                CHECK(v >= -31.0);
            }
        }
    }
}

TEST_CASE("evaluate_placement marks unsolvable cases infeasible") {
    auto net = ieee33();
    CHECK(evaluate_placement(net, Placement({2}, 1000.0), {}).finite());
    CHECK_FALSE(evaluate_placement(net, Placement({8, 15, 16, 17, 18}, 1000.0), {}).finite());
}

TEST_CASE("exhaustive enumeration on the 33-bus system") {
    auto net = ieee33();

    SECTION("n_evci = 1 scans the 32 candidate buses") {
        auto rep = enumerate_all(net, 1000.0, 1, {}, 2);
        CHECK(rep.n_evaluations == 32);
        CHECK(rep.cloud.size() == 32);
        // adding load anywhere raises both objectives above base
        for (const auto& o : rep.cloud) {
            REQUIRE(o.finite());
            CHECK(o.loss_kw > rep.base_objectives.loss_kw);
            CHECK(o.sq_dev > rep.base_objectives.sq_dev);
        }
    }
    SECTION("combination counting") {
        CHECK(combination_count(32, 5, 1'000'000) == 201'376);
        CHECK(combination_count(32, 1, 1'000'000) == 32);
        CHECK(combination_count(4, 2, 1'000'000) == 6);
    }
    SECTION("budget exceeded advises the optimizer") {
        REQUIRE_THROWS_WITH(enumerate_all(net, 1000.0, 5, {}, 1, 1000),
                            Catch::Matchers::ContainsSubstring("MOPSO"));
    }
}

TEST_CASE("toy feeder: enumeration matches hand evaluation") {
    auto net = four_bus();
    auto rep = enumerate_all(net, 500.0, 1, {}, 1);
    REQUIRE(rep.n_evaluations == 3);

    // direct evaluation of the three candidates
    std::vector<ObjectivePair> direct;
    for (int bus : {2, 3, 4})
        direct.push_back(evaluate_placement(net, Placement({bus}, 500.0), {}));
    for (size_t i = 0; i < 3; ++i) {
        CHECK(rep.cloud[i].loss_kw == direct[i].loss_kw);
        CHECK(rep.cloud[i].sq_dev == direct[i].sq_dev);
    }

    // bus 2 is upstream of everything: it must dominate buses 3 and 4
    CHECK(dominates(direct[0], direct[1]));
    CHECK(dominates(direct[0], direct[2]));
    REQUIRE(rep.front.size() == 1);
    CHECK(rep.locations_of(rep.front[0]) == std::vector<int>{2});
    CHECK(rep.best_index == rep.front[0]);
}

TEST_CASE("workers do not change enumeration results") {
    auto net = ieee33();
    auto a = enumerate_all(net, 1000.0, 2, {}, 1);
    auto b = enumerate_all(net, 1000.0, 2, {}, 2);
    REQUIRE(a.cloud.size() == b.cloud.size());
    for (size_t i = 0; i < a.cloud.size(); ++i) {
        CHECK(a.cloud[i].loss_kw == b.cloud[i].loss_kw);
        CHECK(a.cloud[i].sq_dev == b.cloud[i].sq_dev);
    }
    CHECK(a.front == b.front);
    CHECK(a.best_index == b.best_index);
}

TEST_CASE("mopso on the toy feeder finds the enumerated best compromise") {
    auto net = four_bus();
    auto truth = enumerate_all(net, 500.0, 1, {}, 1);
    auto rep = run_mopso(net, 500.0, 1, quick_cfg(3), {}, 1);
    CHECK(rep.best_locations == truth.locations_of(truth.best_index));
    CHECK(rep.best_objectives == truth.cloud[truth.best_index]);
}

TEST_CASE("mopso answers are never dominated by the enumeration cloud") {
    auto net = ieee33();
    auto truth = enumerate_all(net, 1000.0, 2, {}, 2);
    for (std::uint64_t seed : {1, 2, 3}) {
        auto rep = run_mopso(net, 1000.0, 2, quick_cfg(seed), {}, 2);
        for (const auto& o : truth.cloud)
            CHECK_FALSE(dominates(o, rep.best_objectives));
    }
}

TEST_CASE("mopso with a fixed seed is reproducible") {
    auto net = four_bus();
    auto a = run_mopso(net, 300.0, 2, quick_cfg(42), {}, 1);
    auto b = run_mopso(net, 300.0, 2, quick_cfg(42), {}, 2);  // workers must not matter
    CHECK(a.best_locations == b.best_locations);
    CHECK(a.best_objectives == b.best_objectives);
    REQUIRE(a.runs.size() == b.runs.size());
    for (size_t r = 0; r < a.runs.size(); ++r) {
        CHECK(a.runs[r].iterations == b.runs[r].iterations);
        REQUIRE(a.runs[r].front.size() == b.runs[r].front.size());
        for (size_t i = 0; i < a.runs[r].front.size(); ++i)
            CHECK(a.runs[r].front[i].objectives == b.runs[r].front[i].objectives);
    }
}

TEST_CASE("n_evci = 0 returns the base case") {
    auto net = ieee33();
    auto rep = run_mopso(net, 1000.0, 0, quick_cfg(1), {}, 1);
    CHECK(rep.best_locations.empty());
    CHECK(rep.best_objectives == rep.base_objectives);
    CHECK(rep.runs.empty());
}

TEST_CASE("archive soundness holds throughout a mopso run") {
    auto net = ieee33();
    auto rep = run_mopso(net, 1000.0, 3, quick_cfg(5), {}, 2);
    for (const auto& run : rep.runs) {
        for (size_t i = 0; i < run.front.size(); ++i)
            for (size_t j = 0; j < run.front.size(); ++j)
                if (i != j)
                    CHECK_FALSE(dominates(run.front[i].objectives, run.front[j].objectives));
    }
}
