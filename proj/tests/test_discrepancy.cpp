#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "lab/discrepancy.hpp"
#include "lab/er_model.hpp"
#include "lab/search.hpp"

using namespace lab;

namespace {

// Independent counting oracle: plain loops over raw masks.
std::int64_t count_oracle(const SubsetMask& x, const SubsetMask& y, const SubsetMask& a) {
    const Group& g = x.group();
    std::int64_t c = 0;
    for (std::uint32_t u = 0; u < g.size(); ++u) {
        if (!x.test(u)) continue;
        for (std::uint32_t v = 0; v < g.size(); ++v)
            if (y.test(v) && a.test(g.op(u, v))) ++c;
    }
    return c;
}

std::int64_t energy_oracle(const SubsetMask& x, const SubsetMask& y) {
    const Group& g = x.group();
    const auto xs = x.elements();
    const auto ys = y.elements();
    std::int64_t quads = 0;
    for (auto x1 : xs)
        for (auto y1 : ys)
            for (auto x2 : xs)
                for (auto y2 : ys)
                    quads += g.op(x1, y1) == g.op(x2, y2);
    return quads;
}

}  // namespace

TEST_SUITE("discrepancy") {

TEST_CASE("count_pairs endpoints and small case") {
    const Group g = Group::cyclic(5);
    const SubsetMask x = SubsetMask::of(g, {0, 1});
    const SubsetMask y = SubsetMask::of(g, {0, 1});
    CHECK(count_pairs(x, y, SubsetMask::full(g)) == 4);
    CHECK(count_pairs(x, y, SubsetMask(g)) == 0);
    CHECK(count_pairs(x, y, SubsetMask::of(g, {1, 4})) == 2);

    const Group h = Group::cyclic(7);
    CHECK_THROWS_AS(count_pairs(x, y, SubsetMask::full(h)), std::invalid_argument);
}

TEST_CASE("rep_counts small cases") {
    const Group g = Group::cyclic(4);
    const SubsetMask e = SubsetMask::of(g, {0});
    const RepCounts identity_rep = rep_counts(e, e);
    CHECK(identity_rep.counts == std::vector<std::int64_t>{1, 0, 0, 0});

    const SubsetMask x = SubsetMask::of(g, {0, 1});
    const RepCounts rep = rep_counts(x, x);
    CHECK(rep.counts == std::vector<std::int64_t>{1, 2, 1, 0});
    CHECK(rep.pair_total == 4);

    const SubsetMask full = SubsetMask::full(g);
    for (std::int64_t r : rep_counts(full, full).counts) CHECK(r == 4);
}

TEST_CASE("energy endpoints") {
    const Group g = Group::cyclic(4);
    const SubsetMask e = SubsetMask::of(g, {0});
    CHECK(energy(e, e) == 1);
    CHECK(energy(SubsetMask::full(g), SubsetMask::full(g)) == 64);
    const SubsetMask x = SubsetMask::of(g, {0, 1});
    CHECK(energy(x, x) == 6);
}

TEST_CASE("energy equality at a subgroup") {
    const Group g = Group::cyclic(8);
    const SubsetMask h = SubsetMask::of(g, {0, 2, 4, 6});
    // All products collide maximally on a subgroup: E = |H|^3.
    CHECK(energy(h, h) == 64);
    CHECK(energy(h, h) == std::int64_t(h.cardinality()) * h.cardinality() * h.cardinality());
}

TEST_CASE("epsilon deviation") {
    const Group g = Group::cyclic(5);
    const SubsetMask x = SubsetMask::of(g, {0, 1});
    CHECK(epsilon_deviation(x, x, SubsetMask::full(g)) == doctest::Approx(0.5));
    CHECK(epsilon_deviation(x, x, SubsetMask::of(g, {1, 4})) == doctest::Approx(0.0));
    CHECK_THROWS_AS(epsilon_deviation(SubsetMask(g), x, SubsetMask::full(g)),
                    std::invalid_argument);
}

TEST_CASE("random instances satisfy the counting identities") {
    const Group groups[] = {Group::cyclic(16), Group::boolean_cube(4),
                            Group::from_table({0, 1, 2, 1, 2, 0, 2, 0, 1})};
    for (const Group& g : groups) {
        for (int i = 0; i < 8; ++i) {
            const SubsetMask x = random_subset_density_half(g, Seed{7, std::uint64_t(2 * i)});
            const SubsetMask y = random_subset_density_half(g, Seed{7, std::uint64_t(2 * i + 1)});
            const SubsetMask a = random_subset_density_half(g, Seed{8, std::uint64_t(i)});
            if (x.cardinality() == 0 || y.cardinality() == 0) continue;

            const RepCounts rep = rep_counts(x, y);
            std::int64_t total = 0, e = 0;
            std::int64_t max_r = 0;
            for (std::int64_t r : rep.counts) {
                total += r;
                e += r * r;
                max_r = std::max(max_r, r);
            }
            const std::int64_t xy = std::int64_t(x.cardinality()) * y.cardinality();
            CHECK(total == xy);
            CHECK(max_r <= std::min(x.cardinality(), y.cardinality()));
            CHECK(count_pairs(rep, a) == count_pairs(x, y, a));
            CHECK(count_pairs(x, y, a) == count_oracle(x, y, a));
            CHECK(e == energy(x, y));
            CHECK(e == energy_oracle(x, y));
            CHECK(e >= xy);
            CHECK(e <= xy * std::min(x.cardinality(), y.cardinality()));

            const DiscrepancyReport rep2 = discrepancy_report(x, y, a);
            CHECK(rep2.normalized_inner ==
                  doctest::Approx(2.0 * (double(rep2.pair_count) / double(xy) - 0.5)));
            CHECK(std::abs(rep2.normalized_inner) <= 1.0 + 1e-12);
            CHECK(rep2.epsilon_extracted_at ==
                  doctest::Approx(std::abs(rep2.normalized_inner) / 2.0));
        }
    }
}

TEST_CASE("worst pair search: full set makes every pair extreme") {
    const Group g = Group::cyclic(6);
    SearchConfig config;
    config.method = SearchMethod::greedy;
    config.min_size_x = 2;
    config.min_size_y = 2;
    config.seed = Seed{1, 2};
    const SearchOutcome out = worst_pair_search(SubsetMask::full(g), config);
    CHECK(out.best_deviation == doctest::Approx(0.5));
}

TEST_CASE("exhaustive search equals an independent double loop at n = 8") {
    const Group g = Group::cyclic(8);
    const SubsetMask a = random_subset_density_half(g, Seed{21, 5});

    SearchConfig config;
    config.method = SearchMethod::exhaustive;
    config.min_size_x = 2;
    config.min_size_y = 2;
    config.budget = 100'000'000;
    const SearchOutcome out = worst_pair_search(a, config);

    // Oracle: every admissible pair, counts via triple loops.
    double best = -1;
    for (std::uint32_t xm = 0; xm < 256; ++xm) {
        if (std::popcount(xm) < 2) continue;
        std::vector<std::uint32_t> xe;
        for (std::uint32_t e = 0; e < 8; ++e)
            if ((xm >> e) & 1u) xe.push_back(e);
        for (std::uint32_t ym = 0; ym < 256; ++ym) {
            if (std::popcount(ym) < 2) continue;
            std::int64_t c = 0;
            std::int64_t m = 0;
            for (std::uint32_t u : xe)
                for (std::uint32_t v = 0; v < 8; ++v)
                    if ((ym >> v) & 1u) {
                        ++m;
                        c += a.test(g.op(u, v));
                    }
            best = std::max(best, std::abs(double(c) / double(m) - 0.5));
        }
    }
    CHECK(out.best_deviation == doctest::Approx(best).epsilon(1e-12));
    // The reported pair reproduces the reported deviation.
    CHECK(epsilon_deviation(out.best_x, out.best_y, a) == doctest::Approx(out.best_deviation));
}

TEST_CASE("greedy started at the exhaustive optimum stays there") {
    const Group g = Group::cyclic(8);
    const SubsetMask a = random_subset_density_half(g, Seed{22, 9});
    SearchConfig config;
    config.method = SearchMethod::exhaustive;
    config.min_size_x = 2;
    config.min_size_y = 2;
    config.budget = 100'000'000;
    const SearchOutcome opt = worst_pair_search(a, config);

    SearchConfig greedy;
    greedy.method = SearchMethod::greedy;
    greedy.min_size_x = 2;
    greedy.min_size_y = 2;
    greedy.restarts = 1;
    greedy.start_x = opt.best_x;
    greedy.start_y = opt.best_y;
    const SearchOutcome stay = worst_pair_search(a, greedy);
    CHECK(stay.best_deviation == doctest::Approx(opt.best_deviation));
    CHECK(stay.best_x == opt.best_x);
    CHECK(stay.best_y == opt.best_y);
}

TEST_CASE("anneal never beats the exhaustive optimum") {
    const Group g = Group::boolean_cube(3);
    const SubsetMask a = random_subset_density_half(g, Seed{23, 1});
    SearchConfig ex;
    ex.method = SearchMethod::exhaustive;
    ex.min_size_x = 2;
    ex.min_size_y = 2;
    ex.budget = 100'000'000;
    const SearchOutcome opt = worst_pair_search(a, ex);

    SearchConfig an;
    an.method = SearchMethod::anneal;
    an.min_size_x = 2;
    an.min_size_y = 2;
    an.budget = 20000;
    an.restarts = 4;
    an.seed = Seed{4, 4};
    const SearchOutcome found = worst_pair_search(a, an);
    CHECK(found.best_deviation <= opt.best_deviation + 1e-12);
    CHECK(found.evaluations > 0);
}

TEST_CASE("search rejects infeasible floors") {
    const Group g = Group::cyclic(8);
    SearchConfig config;
    config.min_size_x = 9;
    config.min_size_y = 2;
    CHECK_THROWS_AS(worst_pair_search(SubsetMask::full(g), config), std::invalid_argument);
}

TEST_CASE("er deviation basics") {
    // A single cross pair is one Bernoulli edge: the edge fraction is 0 or 1,
    // so the deviation from 1/2 is exactly 1/2 either way. Both edge states
    // must occur across seeds.
    int with_edge = 0, without_edge = 0;
    for (int i = 0; i < 200; ++i) {
        const Seed seed{30, std::uint64_t(i)};
        CHECK(er_bipartite_deviation(8, seed, {0}, {1}) == doctest::Approx(0.5));
        if (ErGraph(8, seed).edge(0, 1)) ++with_edge;
        else ++without_edge;
    }
    CHECK(with_edge > 50);
    CHECK(without_edge > 50);

    CHECK_THROWS_AS(er_bipartite_deviation(8, Seed{1, 1}, {3}, {3}), std::invalid_argument);
    CHECK_THROWS_AS(er_bipartite_deviation(8, Seed{1, 1}, {}, {1}), std::invalid_argument);
}

TEST_CASE("er overlapping sets adjust the denominator") {
    // X = Y = {0,1}: the two admissible ordered pairs share one edge
    // indicator, so e(X,Y) is 0 or 2 out of 2 and the deviation is 1/2.
    for (int i = 0; i < 20; ++i) {
        const ErGraph graph(4, Seed{31, std::uint64_t(i)});
        CHECK(graph.deviation({0, 1}, {0, 1}) == doctest::Approx(0.5));
        CHECK(graph.count_ordered_pairs({0, 1}, {0, 1}) == (graph.edge(0, 1) ? 2u : 0u));
    }
}

TEST_CASE("er sampling is deterministic per seed") {
    const ErGraph a(64, Seed{5, 6});
    const ErGraph b(64, Seed{5, 6});
    for (std::uint32_t u = 0; u < 64; ++u)
        for (std::uint32_t v = 0; v < 64; ++v) REQUIRE(a.edge(u, v) == b.edge(u, v));
    CHECK_FALSE(a.edge(3, 3));
}

}  // TEST_SUITE
