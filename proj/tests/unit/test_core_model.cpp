#include "kmedoids/dissimilarity.hpp"
#include "kmedoids/model.hpp"
#include "kmedoids/objective.hpp"
#include "kmedoids/optimize.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace kmedoids;
using namespace kmedoids::testing;

TEST_CASE("matrix construction validates its input") {
    CHECK_THROWS(DissimilarityMatrix(1, {0.0}));
    CHECK_THROWS(DissimilarityMatrix(2, {0.0, 1.0, 1.0}));
    CHECK_THROWS(DissimilarityMatrix(2, {1.0, 1.0, 1.0, 0.0}));
    CHECK_THROWS(DissimilarityMatrix(2, {0.0, -1.0, -1.0, 0.0}));
    CHECK_THROWS(DissimilarityMatrix(2, {0.0, 1.0, 2.0, 0.0}));
    CHECK_THROWS(DissimilarityMatrix(2, {0.0, std::nan(""), std::nan(""), 0.0}));
    const DissimilarityMatrix near(2, {0.0, 1.0, 1.0 + 1e-13, 0.0});
    CHECK(near(0, 1) == near(1, 0));
    CHECK(near(0, 1) == 1.0 + 1e-13);
}

TEST_CASE("medoid set validation") {
    CHECK_THROWS(MedoidSet({}, 4));
    CHECK_THROWS(MedoidSet({0, 1, 2, 3}, 4));
    CHECK_THROWS(MedoidSet({0, 4}, 4));
    CHECK_THROWS(MedoidSet({1, 1}, 4));
    const MedoidSet ok({3, 1}, 4);
    CHECK(ok.size() == 2);
    CHECK(ok.contains(3));
    CHECK_FALSE(ok.contains(0));
}

TEST_CASE("total deviation examples") {
    const auto d = line_matrix({0, 1, 2, 10});
    CHECK(total_deviation(d, MedoidSet({1, 3}, 4)) == 2.0);

    const DissimilarityMatrix zero(5, std::vector<double>(25, 0.0));
    CHECK(total_deviation(zero, MedoidSet({0, 3}, 5)) == 0.0);

    // Two groups of identical points: medoids on one copy of each cost nothing.
    const auto dup = line_matrix({0, 0, 0, 5, 5});
    CHECK(total_deviation(dup, MedoidSet({1, 4}, 5)) == 0.0);
}

TEST_CASE("medoid of a set") {
    const auto d5 = line_matrix({0, 1, 2, 3, 10});
    const std::vector<PointIndex> all5{0, 1, 2, 3, 4};
    CHECK(medoid_of_set(d5, std::span<const PointIndex>(all5)) == 2);

    const auto d4 = line_matrix({0, 1, 2, 10});
    const std::vector<PointIndex> all4{0, 1, 2, 3};
    CHECK(medoid_of_set(d4, std::span<const PointIndex>(all4)) == 1);

    const std::vector<PointIndex> single{3};
    CHECK(medoid_of_set(d4, std::span<const PointIndex>(single)) == 3);
    CHECK_THROWS_WITH(medoid_of_set(d4, std::span<const PointIndex>()), "empty cluster");
}

TEST_CASE("medoid of a set does not depend on member order") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto d = random_int_matrix(15, 4, seed);
        std::vector<PointIndex> members{0, 2, 3, 5, 7, 8, 11, 14};
        const PointIndex reference = medoid_of_set(d, std::span<const PointIndex>(members));
        Rng rng(seed);
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
            CHECK(medoid_of_set(d, std::span<const PointIndex>(members)) == reference);
        }
    }
}

TEST_CASE("assign nearest example") {
    const auto d = line_matrix({0, 5, 6, 10});
    const MedoidSet medoids({0, 3}, 4);
    const AssignmentCache cache = assign_nearest(d, medoids);
    CHECK(cache.nearest == std::vector<Slot>{0, 0, 1, 1});
    CHECK(cache.d_nearest == std::vector<double>{0, 5, 4, 0});
    CHECK(cache.d_second == std::vector<double>{10, 5, 6, 10});
    CHECK(cache.second == std::vector<Slot>{1, 1, 0, 0});
    CHECK_THROWS_WITH(assign_nearest(d, MedoidSet({0}, 4)), "need at least two medoids for swap-based optimization");
}

TEST_CASE("assign nearest agrees with an independent two-pass scan") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng(seed);
        const std::size_t n = 5 + rng.below(30), k = 2 + rng.below(std::min<std::size_t>(6, n - 2));
        const auto d = random_int_matrix(n, 5, seed);
        std::vector<PointIndex> pool(n);
        std::iota(pool.begin(), pool.end(), PointIndex{0});
        const MedoidSet medoids(detail::draw_without_replacement(pool, k, rng), n);
        const AssignmentCache cache = assign_nearest(d, medoids);
        for (PointIndex o = 0; o < n; ++o) {
            // Pass 1: best slot; a point that is a medoid always takes its own slot.
            Slot first = k;
            for (Slot j = 0; j < k; ++j) {
                if (medoids[j] == o) first = j;
            }
            if (first == k) {
                first = 0;
                for (Slot j = 1; j < k; ++j) {
                    if (d(medoids[j], o) < d(medoids[first], o)) first = j;
                }
            }
            // Pass 2: best remaining slot.
            Slot second = first == 0 ? 1 : 0;
            for (Slot j = 0; j < k; ++j) {
                if (j != first && d(medoids[j], o) < d(medoids[second], o)) second = j;
            }
            CHECK(cache.nearest[o] == first);
            CHECK(cache.second[o] == second);
            CHECK(cache.d_nearest[o] == d(medoids[first], o));
            CHECK(cache.d_second[o] == d(medoids[second], o));
            CHECK(cache.d_nearest[o] <= cache.d_second[o]);
        }
        for (Slot j = 0; j < k; ++j) {
            CHECK(cache.nearest[medoids[j]] == j);
            CHECK(cache.d_nearest[medoids[j]] == 0.0);
        }
    }
}

TEST_CASE("k = 2: the second slot is always the other one") {
    const auto d = random_int_matrix(20, 3, 7);
    const AssignmentCache cache = assign_nearest(d, MedoidSet({4, 9}, 20));
    for (PointIndex o = 0; o < 20; ++o) CHECK(cache.second[o] == 1 - cache.nearest[o]);
}

TEST_CASE("equidistant point goes to the smaller slot") {
    const auto d = line_matrix({0, 5, 10});
    CHECK(assign_nearest(d, MedoidSet({2, 0}, 3)).nearest[1] == 0);
    CHECK(assign_nearest(d, MedoidSet({0, 2}, 3)).nearest[1] == 0);
}

TEST_CASE("swap delta oracle example") {
    const auto d = line_matrix({0, 5, 6, 10});
    const MedoidSet medoids({0, 3}, 4);
    const AssignmentCache cache = assign_nearest(d, medoids);
    CHECK(swap_change(d(1, 0), cache.nearest[0], cache.d_nearest[0], cache.d_second[0], 0) == 5.0);
    CHECK(swap_change(d(1, 1), cache.nearest[1], cache.d_nearest[1], cache.d_second[1], 0) == -5.0);
    CHECK(swap_change(d(1, 2), cache.nearest[2], cache.d_nearest[2], cache.d_second[2], 0) == -3.0);
    CHECK(swap_change(d(1, 3), cache.nearest[3], cache.d_nearest[3], cache.d_second[3], 0) == 0.0);
    CHECK(swap_delta_oracle(d, cache, medoids, 0, 1) == -3.0);
    CHECK(total_deviation(d, medoids) == 9.0);
    CHECK(total_deviation(d, MedoidSet({1, 3}, 4)) == 6.0);
    CHECK_THROWS(swap_delta_oracle(d, cache, medoids, 0, 3));
}

TEST_CASE("swapping a medoid for its exact duplicate changes nothing") {
    const auto d = line_matrix({0, 0, 4, 9, 9, 12});
    const MedoidSet medoids({0, 3}, 6);
    const AssignmentCache cache = assign_nearest(d, medoids);
    CHECK(swap_delta_oracle(d, cache, medoids, 0, 1) == 0.0);
    CHECK(swap_delta_oracle(d, cache, medoids, 1, 4) == 0.0);
}

TEST_CASE("a candidate beyond every second-nearest distance") {
    // Objects outside slot i fall in case (a) and contribute 0; members of slot i
    // fall in case (b2), so the delta is exactly the removal loss of slot i.
    const auto d = line_matrix({0, 1, 2, 10, 11, 500});
    const MedoidSet medoids({1, 4}, 6);
    const AssignmentCache cache = assign_nearest(d, medoids);
    const RemovalLossTable table = removal_loss(cache);
    for (Slot i = 0; i < 2; ++i) {
        double outside = 0.0;
        for (PointIndex o = 0; o < 5; ++o) {
            if (cache.nearest[o] != i) outside += swap_change(d(5, o), cache.nearest[o], cache.d_nearest[o], cache.d_second[o], i);
        }
        CHECK(outside == 0.0);
    }
    CHECK(swap_delta_oracle(d, cache, medoids, 0, 5) == table[0] + (d(5, 5) - cache.d_nearest[5]));
}

TEST_CASE("oracle equals recomputed loss change on 500 random integer instances") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Rng rng(seed * 31 + 1);
        const std::size_t n = 3 + rng.below(38);
        const std::size_t k = 2 + rng.below(std::min<std::size_t>(5, n - 2));
        const auto d = random_int_matrix(n, 1 + rng.below(20), seed);
        std::vector<PointIndex> pool(n);
        std::iota(pool.begin(), pool.end(), PointIndex{0});
        const MedoidSet medoids(detail::draw_without_replacement(pool, k, rng), n);
        const AssignmentCache cache = assign_nearest(d, medoids);
        const double before = total_deviation(d, medoids);
        for (int trial = 0; trial < 5; ++trial) {
            PointIndex c;
            do c = rng.below(n);
            while (medoids.contains(c));
            const Slot slot = rng.below(k);
            MedoidSet after = medoids;
            after.replace(slot, c);
            CHECK(swap_delta_oracle(d, cache, medoids, slot, c) == total_deviation(d, after) - before);
        }
    }
}

TEST_CASE("apply swap example and reversal") {
    const auto d = line_matrix({0, 5, 6, 10});
    MedoidSet medoids({0, 3}, 4);
    AssignmentCache cache = assign_nearest(d, medoids);
    const AssignmentCache original = cache;
    apply_swap(d, medoids, cache, 0, 1);
    CHECK(medoids.indices() == std::vector<PointIndex>{1, 3});
    CHECK(cache.nearest[2] == 0);
    CHECK(cache.d_nearest[2] == 1.0);
    CHECK(cache == assign_nearest(d, medoids));
    CHECK_THROWS(apply_swap(d, medoids, cache, 0, 1));
    apply_swap(d, medoids, cache, 0, 0);
    CHECK(cache == original);
}

TEST_CASE("apply swap equals a fresh assignment after every random swap") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng(seed + 1000);
        const std::size_t n = 4 + rng.below(40);
        const std::size_t k = 2 + rng.below(std::min<std::size_t>(7, n - 3));
        // Few distinct values give many ties.
        const auto d = random_int_matrix(n, 1 + rng.below(4), seed);
        std::vector<PointIndex> pool(n);
        std::iota(pool.begin(), pool.end(), PointIndex{0});
        MedoidSet medoids(detail::draw_without_replacement(pool, k, rng), n);
        AssignmentCache cache = assign_nearest(d, medoids);
        for (int step = 0; step < 20; ++step) {
            PointIndex c;
            do c = rng.below(n);
            while (medoids.contains(c));
            const Slot slot = rng.below(k);
            const AssignmentCache before = cache;
            const PointIndex removed = medoids[slot];
            apply_swap(d, medoids, cache, slot, c);
            REQUIRE(cache == assign_nearest(d, medoids));
            MedoidSet back = medoids;
            AssignmentCache restored = cache;
            apply_swap(d, back, restored, slot, removed);
            CHECK(restored == before);
        }
    }
}

TEST_CASE("removal loss example and sum consistency") {
    const auto d = line_matrix({0, 5, 6, 10});
    const AssignmentCache cache = assign_nearest(d, MedoidSet({0, 3}, 4));
    CHECK(removal_loss(cache) == RemovalLossTable{10, 12});

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const std::size_t n = 4 + rng.below(30), k = 2 + rng.below(std::min<std::size_t>(5, n - 3));
        const auto dm = random_int_matrix(n, 10, seed);
        std::vector<PointIndex> pool(n);
        std::iota(pool.begin(), pool.end(), PointIndex{0});
        const MedoidSet medoids(detail::draw_without_replacement(pool, k, rng), n);
        const AssignmentCache c = assign_nearest(dm, medoids);
        const RemovalLossTable table = removal_loss(c);
        double lhs = 0.0, rhs = 0.0;
        for (double v : table) {
            CHECK(v >= 0.0);
            lhs += v;
        }
        for (PointIndex o = 0; o < n; ++o) rhs += c.d_second[o] - c.d_nearest[o];
        CHECK(lhs == rhs);
        // Removing a medoid and reassigning its members costs exactly the table entry.
        for (Slot i = 0; i < k; ++i) {
            std::vector<PointIndex> rest;
            for (Slot j = 0; j < k; ++j) {
                if (j != i) rest.push_back(medoids[j]);
            }
            CHECK(td_direct(dm, rest) - td_direct(dm, medoids.indices()) == table[i]);
        }
    }
}

TEST_CASE("removal loss of medoids without members is the distance to the next medoid") {
    // Three medoids far apart, no other points.
    const auto d = line_matrix({0, 10, 30, 31});
    const AssignmentCache cache = assign_nearest(d, MedoidSet({0, 1, 2}, 4));
    const RemovalLossTable table = removal_loss(cache);
    CHECK(table[0] == 10.0);
    CHECK(table[1] == 10.0);
    CHECK(table[2] == 40.0);
}
