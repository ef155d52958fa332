#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "evplan/pareto.hpp"

using namespace evplan;

namespace {

ArchiveEntry entry(std::vector<int> locs, double f1, double f2) {
    return {Placement(std::move(locs), 1000.0), {f1, f2}};
}

bool archive_is_sound(const ParetoArchive& arch) {
    const auto& ms = arch.members();
    for (size_t i = 0; i < ms.size(); ++i)
        for (size_t j = 0; j < ms.size(); ++j)
            if (i != j && dominates(ms[i].objectives, ms[j].objectives)) return false;
    return true;
}

/// Brute-force O(n^2) Pareto front, the oracle for the plane sweep.
std::vector<size_t> brute_front(const std::vector<ObjectivePair>& cloud) {
    std::vector<size_t> out;
    for (size_t i = 0; i < cloud.size(); ++i) {
        if (!cloud[i].finite()) continue;
        bool dominated = false;
        for (size_t j = 0; j < cloud.size() && !dominated; ++j)
            if (j != i && dominates(cloud[j], cloud[i])) dominated = true;
        if (!dominated) out.push_back(i);
    }
    return out;
}

}  // namespace

TEST_CASE("dominance over objective pairs") {
    CHECK(dominates({1, 2}, {2, 3}));
    CHECK_FALSE(dominates({1, 3}, {2, 2}));
    CHECK_FALSE(dominates({2, 2}, {1, 3}));
    CHECK_FALSE(dominates({1, 2}, {1, 2}));  // no strict improvement
    CHECK(dominates({1, 2}, {1, 3}));
    CHECK(dominates({1, 2}, {kInf, kInf}));
    CHECK_FALSE(dominates({kInf, kInf}, {kInf, kInf}));
}

TEST_CASE("archive insertion rules") {
    ParetoArchive arch(10);

    SECTION("dominating candidate evicts") {
        arch.insert(entry({2}, 2, 2));
        CHECK(arch.insert(entry({3}, 1, 1)));
        REQUIRE(arch.size() == 1);
        CHECK(arch.members()[0].objectives == ObjectivePair{1, 1});
    }
    SECTION("dominated candidate is rejected") {
        arch.insert(entry({2}, 2, 2));
        CHECK_FALSE(arch.insert(entry({3}, 3, 3)));
        CHECK(arch.size() == 1);
    }
    SECTION("incomparable candidates coexist") {
        arch.insert(entry({2}, 2, 2));
        CHECK(arch.insert(entry({3}, 1, 3)));
        CHECK(arch.size() == 2);
    }
    SECTION("same placement collapses to one entry") {
        arch.insert(entry({2, 5}, 2, 2));
        CHECK_FALSE(arch.insert(entry({5, 2}, 2, 2)));
        CHECK(arch.size() == 1);
    }
    SECTION("infeasible pairs never enter") {
        CHECK_FALSE(arch.insert(entry({2}, kInf, kInf)));
        CHECK(arch.empty());
    }
}

TEST_CASE("randomized insert sequences never hold a dominated pair") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(0.0, 10.0);
    std::uniform_int_distribution<int> bus(2, 33);
    for (int round = 0; round < 200; ++round) {
        ParetoArchive arch(16);
        for (int i = 0; i < 60; ++i) {
            arch.insert(entry({bus(rng)}, uni(rng), uni(rng)));
            if (arch.size() > 16) arch.crowding_truncate();
        }
        REQUIRE(archive_is_sound(arch));
        CHECK(arch.size() <= 16);
    }
}

TEST_CASE("crowding truncation") {
    SECTION("three members, capacity two: the boundaries survive") {
        ParetoArchive arch(2);
        arch.insert(entry({2}, 0, 10));
        arch.insert(entry({3}, 5, 5));
        arch.insert(entry({4}, 10, 0));
        REQUIRE(arch.size() == 3);
        arch.crowding_truncate();
        REQUIRE(arch.size() == 2);
        CHECK(arch.members()[0].objectives == ObjectivePair{0, 10});
        CHECK(arch.members()[1].objectives == ObjectivePair{10, 0});
    }
    SECTION("hand-computed distances drop the crowded point") {
        // f1 in {0, .25, .5, 1}, f2 mirrored; capacity 3 drops the 0.25 point:
        // d(.25) = (.5-0)/1 + (1-.5)/1 = 1.0 < d(.5) = (1-.25)/1 + (.75-0)/1 = 1.5
        ParetoArchive arch(3);
        arch.insert(entry({2}, 0.0, 1.0));
        arch.insert(entry({3}, 0.25, 0.75));
        arch.insert(entry({4}, 0.5, 0.5));
        arch.insert(entry({5}, 1.0, 0.0));
        REQUIRE(arch.size() == 4);
        arch.crowding_truncate();
        REQUIRE(arch.size() == 3);
        for (const auto& m : arch.members())
            CHECK(m.objectives.loss_kw != 0.25);
    }
    SECTION("no-op at or below capacity") {
        ParetoArchive arch(3);
        arch.insert(entry({2}, 0, 1));
        arch.insert(entry({3}, 1, 0));
        auto before = arch.members();
        arch.crowding_truncate();
        REQUIRE(arch.size() == before.size());
        for (size_t i = 0; i < before.size(); ++i)
            CHECK(arch.members()[i].objectives == before[i].objectives);
    }
    SECTION("degenerate objective range contributes zero, not NaN") {
        // all members share f1, so the first objective's range is zero
        std::vector<ArchiveEntry> members{entry({2}, 1.0, 5.0), entry({3}, 1.0, 4.0),
                                          entry({4}, 1.0, 3.0)};
        auto d = crowding_distances(members);
        CHECK(d[0] == kInf);  // boundaries of the dev-sorted order
        CHECK(d[2] == kInf);
        CHECK(d[1] == 1.0);   // only the f2 term contributes: (5-3)/(5-3)
    }
}

TEST_CASE("plane sweep front equals brute force on random clouds") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> dup(0, 4);
    for (int round = 0; round < 100; ++round) {
        std::vector<ObjectivePair> cloud;
        for (int i = 0; i < 80; ++i) {
            if (dup(rng) == 0 && !cloud.empty())
                cloud.push_back(cloud[i / 2]);  // inject exact duplicates
            else if (dup(rng) == 1)
                cloud.push_back({kInf, kInf});
            else
                cloud.push_back({uni(rng), uni(rng)});
        }
        auto fast = nondominated_indices(cloud);
        auto slow = brute_front(cloud);
        std::sort(fast.begin(), fast.end());
        std::sort(slow.begin(), slow.end());
        REQUIRE(fast == slow);
    }
}

TEST_CASE("sigma leader selection") {
    ParetoArchive arch(10);

    SECTION("single member archive") {
        arch.insert(entry({2}, 3, 4));
        CHECK(sigma_leader_index({100, 100}, arch) == 0);
    }
    SECTION("closest sigma wins") {
        // normalized objectives make sigma spread across [-1, 1]
        arch.insert(entry({2}, 0.0, 1.0));   // sigma -1
        arch.insert(entry({3}, 0.5, 0.55));  // interior
        arch.insert(entry({4}, 1.0, 0.0));   // sigma +1
        ObjectivePair pure_f1{1.0, 0.0};     // sigma +1 after normalization
        CHECK(sigma_leader_index(pure_f1, arch) == 2);
    }
    SECTION("infeasible particle maps to sigma zero") {
        arch.insert(entry({2}, 0.0, 1.0));
        arch.insert(entry({3}, 1.0, 0.0));
        auto i = sigma_leader_index({kInf, kInf}, arch);
        CHECK((i == 0 || i == 1));  // |0 - (+-1)| ties; archive order breaks it
        CHECK(i == 0);
    }
}

TEST_CASE("fuzzy best compromise") {
    SECTION("worked three-member example") {
        // memberships: (1,0), (0,1), (5/8,5/8); sums 1, 1, 1.25
        std::vector<ObjectivePair> pairs{{1, 9}, {9, 1}, {4, 4}};
        auto [idx, mu] = best_compromise_index(pairs);
        CHECK(idx == 2);
        CHECK(mu == Catch::Approx(1.25 / 3.25));
    }
    SECTION("single member scores mu = 1") {
        std::vector<ObjectivePair> pairs{{3, 3}};
        auto [idx, mu] = best_compromise_index(pairs);
        CHECK(idx == 0);
        CHECK(mu == 1.0);
    }
    SECTION("the ideal point wins outright") {
        std::vector<ObjectivePair> pairs{{1, 1}, {1, 2}, {2, 1}};
        auto [idx, mu] = best_compromise_index(pairs);
        CHECK(idx == 0);
    }
    SECTION("argmax invariant under positive scaling of both objectives") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> uni(0.1, 5.0);
        for (int round = 0; round < 50; ++round) {
            std::vector<ObjectivePair> pairs;
            for (int i = 0; i < 9; ++i) pairs.push_back({uni(rng), uni(rng)});
            auto [i0, mu0] = best_compromise_index(pairs);
            double a = uni(rng), b = uni(rng);
            std::vector<ObjectivePair> scaled;
            for (auto& p : pairs) scaled.push_back({a * p.loss_kw, b * p.sq_dev});
            auto [i1, mu1] = best_compromise_index(scaled);
            CHECK(i0 == i1);
        }
    }
}
