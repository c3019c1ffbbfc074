#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "cemmas/instance.hpp"
#include "cemmas/rng.hpp"
#include "cemmas/tour.hpp"

using namespace cemmas;

namespace {

// Calls fn with every distinct Hamiltonian cycle of 1..n exactly once, as the
// canonical permutation (starts at 1, second element below last).
template <class Fn>
void for_each_cycle(int n, Fn fn) {
    std::vector<int> rest(n - 1);
    std::iota(rest.begin(), rest.end(), 2);
    do {
        if (rest.front() > rest.back()) continue;
        std::vector<int> perm;
        perm.reserve(n);
        perm.push_back(1);
        perm.insert(perm.end(), rest.begin(), rest.end());
        fn(Tour(std::move(perm)));
    } while (std::next_permutation(rest.begin(), rest.end()));
}

Tour random_tour(int n, std::uint64_t seed) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.next_below(i + 1)]);
    }
    return Tour(std::move(perm));
}

} // namespace

TEST_CASE("tour validation") {
    CHECK_THROWS_AS(Tour({1, 2, 2, 4}), std::invalid_argument);
    CHECK_THROWS_AS(Tour({1, 2, 5, 4}), std::invalid_argument);
    CHECK_THROWS_AS(Tour({1, 2}), std::invalid_argument);
}

TEST_CASE("canonical form") {
    CHECK(canonical(Tour({3, 4, 5, 1, 2})).perm() == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(canonical(Tour({1, 5, 4, 3, 2})).perm() == std::vector<int>{1, 2, 3, 4, 5});
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto t = random_tour(7, s);
        const auto c = canonical(t);
        CHECK(canonical(c).perm() == c.perm()); // idempotent
        CHECK(c == t);                          // same cycle
        CHECK(c.perm()[0] == 1);
    }
}

TEST_CASE("cost is exactly invariant under rotation and reversal") {
    const auto gi = make_grid(7, 9, 3);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto t = random_tour(7, s);
        auto p = t.perm();
        std::rotate(p.begin(), p.begin() + 3, p.end());
        const Tour rotated(p);
        std::reverse(p.begin(), p.end());
        const Tour reversed(p);
        CHECK(cost(gi.instance, t) == cost(gi.instance, rotated));
        CHECK(cost(gi.instance, t) == cost(gi.instance, reversed));
    }
}

TEST_CASE("g1 cost law, exhaustive for small n") {
    for (int n : {5, 6}) {
        const auto inst = make_g1(n);
        const Tour opt([n] {
            std::vector<int> p(n);
            std::iota(p.begin(), p.end(), 1);
            return p;
        }());
        for_each_cycle(n, [&](const Tour& t) {
            const int k = shared_edges(t, opt);
            CHECK(cost(inst, t) == k + (n - k) * static_cast<double>(n));
        });
    }
}

TEST_CASE("grid costs match brute-force summation over all cycles of 4 points") {
    const auto inst = Instance::grid(4, {{0, 0}, {3, 1}, {1, 3}, {4, 4}});
    int cycles = 0;
    for_each_cycle(4, [&](const Tour& t) {
        ++cycles;
        double direct = 0.0;
        const auto& p = t.perm();
        for (int i = 0; i < 4; ++i) direct += inst.distance(p[i], p[(i + 1) % 4]);
        CHECK(cost(inst, t) == doctest::Approx(direct).epsilon(1e-15));
    });
    CHECK(cycles == 3);
}

TEST_CASE("shared_edges basics") {
    const Tour a({1, 2, 3, 4, 5});
    CHECK(shared_edges(a, a) == 5);
    CHECK(shared_edges(a, Tour({1, 2, 3, 5, 4})) == 3);
    CHECK_THROWS_AS(shared_edges(a, Tour({1, 2, 3, 4})), std::invalid_argument);
}

TEST_CASE("two distinct cycles can never share n-1 edges") {
    for (int n : {5, 6}) {
        std::vector<Tour> all;
        for_each_cycle(n, [&](const Tour& t) { all.push_back(t); });
        for (const auto& a : all)
            for (const auto& b : all) CHECK(shared_edges(a, b) != n - 1);
    }
}

TEST_CASE("2-exchange reverses the enclosed segment") {
    const Tour t({1, 2, 3, 4, 5, 6});
    ExchangeMove move;
    move.removed = {make_edge(1, 2), make_edge(4, 5)};
    move.added = {make_edge(1, 4), make_edge(2, 5)};
    const Tour result = apply_exchange(t, move);
    CHECK(result == Tour({1, 4, 3, 2, 5, 6}));
    CHECK(shared_edges(result, t) == 4);
}

TEST_CASE("exchange validation") {
    const Tour t({1, 2, 3, 4, 5, 6});
    CHECK_THROWS_AS(apply_exchange(t, ExchangeMove{}), std::invalid_argument);

    ExchangeMove not_in_tour;
    not_in_tour.removed = {make_edge(1, 3), make_edge(4, 5)};
    not_in_tour.added = {make_edge(1, 4), make_edge(3, 5)};
    CHECK_THROWS_AS(apply_exchange(t, not_in_tour), invalid_move_error);

    ExchangeMove splits; // removes two edges, adds two that split the cycle in two triangles
    splits.removed = {make_edge(1, 2), make_edge(4, 5)};
    splits.added = {make_edge(2, 4), make_edge(5, 1)};
    CHECK_THROWS_AS(apply_exchange(t, splits), invalid_move_error);
}

TEST_CASE("jump worked examples") {
    const Tour t({1, 2, 3, 4, 5, 6, 7});
    CHECK(jump(t, 2, 5).perm() == std::vector<int>{1, 3, 4, 5, 2, 6, 7});
    CHECK(jump(t, 5, 2).perm() == std::vector<int>{1, 5, 2, 3, 4, 6, 7});
    CHECK_THROWS_AS(jump(t, 0, 3), std::invalid_argument);
    CHECK_THROWS_AS(jump(t, 3, 3), std::invalid_argument);
}

TEST_CASE("jumps are 2- or 3-exchanges and round trip through apply_exchange") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const auto t = random_tour(8, derive_seed(5, {s}));
        for (int i = 1; i <= 8; ++i) {
            for (int j = 1; j <= 8; ++j) {
                if (i == j) continue;
                const Tour moved = jump(t, i, j);
                const int diff = 8 - shared_edges(t, moved);
                if (std::abs(i - j) == 1) {
                    CHECK(diff <= 2);
                } else {
                    CHECK(diff <= 3);
                }
                if (diff > 0) {
                    // rebuild the move from the edge difference and re-apply
                    const auto ta = t.edges();
                    const auto tb = moved.edges();
                    std::set<Edge> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
                    ExchangeMove move;
                    for (const auto& e : sa)
                        if (!sb.count(e)) move.removed.push_back(e);
                    for (const auto& e : sb)
                        if (!sa.count(e)) move.added.push_back(e);
                    CHECK(apply_exchange(t, move) == moved);
                }
            }
        }
    }
}

TEST_CASE("bowtie uncrossing strictly reduces cost") {
    const auto inst = Instance::grid(2, {{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    const Tour bowtie({1, 3, 2, 4});
    CHECK(count_intersections(inst, bowtie) == 1);
    const auto move = find_intersection_removal(inst, bowtie);
    REQUIRE(move.has_value());
    const Tour fixed = apply_exchange(bowtie, *move);
    CHECK(cost(inst, fixed) < cost(inst, bowtie));
    CHECK(count_intersections(inst, fixed) == 0);

    const Tour hull_tour({1, 2, 3, 4});
    CHECK(count_intersections(inst, hull_tour) == 0);
    CHECK_FALSE(find_intersection_removal(inst, hull_tour).has_value());
}

TEST_CASE("count_intersections matches an independent pairwise recount") {
    const auto gi = make_grid(10, 14, 21);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto t = random_tour(10, derive_seed(61, {s}));
        const auto& pos = gi.instance.positions();
        const auto& p = t.perm();
        int direct = 0;
        for (int i = 0; i < 10; ++i)
            for (int j = i + 1; j < 10; ++j)
                if (segments_intersect(pos[p[i] - 1], pos[p[(i + 1) % 10] - 1],
                                       pos[p[j] - 1], pos[p[(j + 1) % 10] - 1]))
                    ++direct;
        CHECK(count_intersections(gi.instance, t) == direct);
    }
}

TEST_CASE("repeated uncrossing terminates intersection-free; convex case ends in hull order") {
    for (std::uint64_t s = 0; s < 15; ++s) {
        const auto gi = make_grid(8, 12, derive_seed(8, {s}));
        Tour t = random_tour(8, derive_seed(9, {s}));
        double c = cost(gi.instance, t);
        int guard = 0;
        while (auto move = find_intersection_removal(gi.instance, t)) {
            t = apply_exchange(t, *move);
            const double c2 = cost(gi.instance, t);
            CHECK(c2 < c);
            c = c2;
            REQUIRE(++guard < 1000);
        }
        CHECK(count_intersections(gi.instance, t) == 0);
        CHECK(hull_order_respected(t, gi.meta));
        if (gi.meta.interior_count == 0) {
            CHECK(t == Tour(gi.meta.hull));
        }
    }
}

TEST_CASE("hull order checks on convex instances, exhaustively") {
    // all 4 vertices on the hull: hull order iff intersection-free
    const auto inst = Instance::grid(4, {{0, 0}, {3, 1}, {1, 3}, {4, 4}});
    const auto meta = grid_meta(inst);
    for_each_cycle(4, [&](const Tour& t) {
        const bool free_of_crossings = count_intersections(inst, t) == 0;
        CHECK(hull_order_respected(t, meta) == free_of_crossings);
    });
}

TEST_CASE("intersection-free tours respect hull order with one interior vertex") {
    const auto inst = Instance::grid(4, {{0, 0}, {3, 1}, {1, 3}, {4, 4}, {2, 1}});
    const auto meta = grid_meta(inst);
    REQUIRE(meta.interior_count == 1);
    int free_count = 0;
    for_each_cycle(5, [&](const Tour& t) {
        if (count_intersections(inst, t) == 0) {
            ++free_count;
            CHECK(hull_order_respected(t, meta));
        }
    });
    CHECK(free_count > 0);
}
