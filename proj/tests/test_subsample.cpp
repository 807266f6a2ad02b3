#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lab/discrepancy.hpp"
#include "lab/subsample.hpp"

using namespace lab;

namespace {

// Visits every size-k combination of elems.
void for_each_combination(const std::vector<std::uint32_t>& elems, std::uint32_t k,
                          const std::function<void(const std::vector<std::uint32_t>&)>& visit) {
    std::vector<std::uint32_t> idx(k);
    for (std::uint32_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<std::uint32_t> pick(k);
    while (true) {
        for (std::uint32_t i = 0; i < k; ++i) pick[i] = elems[idx[i]];
        visit(pick);
        int i = int(k) - 1;
        while (i >= 0 && idx[i] == elems.size() - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (std::uint32_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

mpq_class brute_force_expected_energy(const SubsetMask& x, const SubsetMask& y, std::uint32_t s,
                                      std::uint32_t t) {
    const Group& g = x.group();
    mpz_class total = 0;
    mpz_class pairs = 0;
    for_each_combination(x.elements(), s, [&](const std::vector<std::uint32_t>& se) {
        for_each_combination(y.elements(), t, [&](const std::vector<std::uint32_t>& te) {
            SubsetMask sm(g), tm(g);
            for (auto e : se) sm.set(e);
            for (auto e : te) tm.set(e);
            total += energy(sm, tm);
            ++pairs;
        });
    });
    const mpz_class n = g.size();
    mpq_class avg(total, pairs * n * n * n);
    avg.canonicalize();
    return avg;
}

}  // namespace

TEST_SUITE("subsample") {

TEST_CASE("parameter formulas") {
    // w = 1e5 makes eps exactly 1.
    const SubsampleParams p1 = choose_subsample_params(3, 1e5, 2, 3);
    CHECK(p1.epsilon == doctest::Approx(1.0));
    // s before clamping is ceil(2000 log 3) = 2198.
    CHECK(p1.s_raw == doctest::Approx(2000.0 * std::log(3.0)));
    CHECK(std::ceil(p1.s_raw) == 2198.0);
    CHECK(p1.s_clamped);
    CHECK(p1.s == 2);

    // eps = 0.5 via w = 6.4e6; t = ceil(4096 * 0.25 / (50 log 4096)) = 3.
    const SubsampleParams p2 = choose_subsample_params(4096, 6.4e6, 4096, 4096);
    CHECK(p2.epsilon == doctest::Approx(0.5));
    CHECK(p2.t == 3);
    CHECK_FALSE(p2.t_clamped);

    CHECK_THROWS_AS(choose_subsample_params(4096, 1e5, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(choose_subsample_params(2, 1e5, 1, 2), std::invalid_argument);
}

TEST_CASE("exact expected energy endpoints") {
    const Group g = Group::cyclic(4);
    const SubsetMask x = SubsetMask::of(g, {0, 1});
    // s = |X|, t = |Y| forces S = X, T = Y.
    CHECK(exact_expected_energy(x, x, 2, 2) == mpq_class(3, 32));
    // s = 1 kills the off-diagonal term.
    CHECK(exact_expected_energy(x, x, 1, 2) == mpq_class(1, 32));
    CHECK(exact_expected_energy(x, x, 1, 1) == mpq_class(1, 64));
    CHECK_THROWS_AS(exact_expected_energy(x, x, 3, 1), std::invalid_argument);
}

TEST_CASE("exact expected energy equals the brute-force average") {
    const Group groups[] = {Group::cyclic(8), Group::boolean_cube(3)};
    int checked = 0;
    std::uint64_t offset = 0;
    for (const Group& g : groups) {
        offset += 100;
        for (int i = 0; i < 6; ++i) {
            SplitMix64 rng(Seed{80, offset + std::uint64_t(i)});
            const SubsetMask universe = SubsetMask::full(g);
            const std::uint32_t xc = 4 + std::uint32_t(rng.next_below(3));  // 4..6
            const std::uint32_t yc = xc + std::uint32_t(rng.next_below(3));
            const SubsetMask x =
                random_fixed_size_subset(universe, xc, Seed{81, std::uint64_t(10 * i)});
            const SubsetMask y =
                random_fixed_size_subset(universe, yc, Seed{81, std::uint64_t(10 * i + 1)});
            const std::uint32_t s = 2 + std::uint32_t(rng.next_below(2));
            const std::uint32_t t = 2 + std::uint32_t(rng.next_below(2));
            REQUIRE(exact_expected_energy(x, y, s, t) == brute_force_expected_energy(x, y, s, t));
            REQUIRE(exact_expected_energy(x, y, s, t) <= expected_energy_bound(x, y, s, t));
            ++checked;
        }
    }
    CHECK(checked == 12);
}

TEST_CASE("monte carlo energy estimate") {
    const Group g = Group::cyclic(4);
    const SubsetMask x = SubsetMask::of(g, {0, 1});

    // Degenerate sampling has zero variance.
    const MonteCarloCheck fixed = mc_expected_energy(x, x, 2, 2, 100, Seed{1, 1});
    CHECK(fixed.mc_mean == doctest::Approx(6.0 / 64.0));
    CHECK(fixed.mc_stderr == doctest::Approx(0.0));
    CHECK(fixed.check_passed);
    CHECK(fixed.exact_below_bound);

    const Group g8 = Group::cyclic(8);
    const SubsetMask x8 = SubsetMask::of(g8, {0, 1, 3, 4, 6});
    const SubsetMask y8 = SubsetMask::of(g8, {1, 2, 3, 5, 6, 7});
    const MonteCarloCheck mc = mc_expected_energy(x8, y8, 3, 3, 100000, Seed{2, 7});
    CHECK(mc.check_passed);
    CHECK(mc.exact_below_bound);
    CHECK(mc.mc_stderr > 0.0);
}

TEST_CASE("monte carlo closeness estimate") {
    const Group g = Group::cyclic(8);
    const SubsetMask universe = SubsetMask::full(g);
    const SubsetMask x = random_fixed_size_subset(universe, 6, Seed{90, 1});
    const SubsetMask y = random_fixed_size_subset(universe, 6, Seed{90, 2});

    // Constant +1 makes both inner products exactly one.
    SignedIndicator ones;
    ones.values.assign(8, 1);
    const MonteCarloCheck flat = mc_closeness(x, y, ones, 3, 3, 100, Seed{91, 0});
    CHECK(flat.mc_mean == doctest::Approx(0.0));
    CHECK(flat.check_passed);

    // Degenerate sampling: S = X, T = Y, gap identically zero.
    const SubsetMask a = random_subset_density_half(g, Seed{92, 5});
    const SignedIndicator f = signed_indicator(a);
    const MonteCarloCheck degen = mc_closeness(x, y, f, 6, 6, 100, Seed{91, 1});
    CHECK(degen.mc_mean == doctest::Approx(0.0));

    // Exhaustive oracle over all C(6,3)^2 subset pairs.
    const std::uint32_t s = 3, t = 3;
    double gap_sum = 0;
    int pair_count = 0;
    for_each_combination(x.elements(), s, [&](const std::vector<std::uint32_t>& se) {
        for_each_combination(y.elements(), t, [&](const std::vector<std::uint32_t>& te) {
            SubsetMask sm(g), tm(g);
            for (auto e : se) sm.set(e);
            for (auto e : te) tm.set(e);
            gap_sum += closeness_gap(x, y, f, sm, tm);
            ++pair_count;
        });
    });
    CHECK(pair_count == 400);
    const double exact_mean = gap_sum / pair_count;
    CHECK(exact_mean <= closeness_bound(6, s, t));

    const MonteCarloCheck mc = mc_closeness(x, y, f, s, t, 100000, Seed{91, 2});
    CHECK(mc.check_passed);
    CHECK(std::abs(mc.mc_mean - exact_mean) <= 4.0 * mc.mc_stderr);
    CHECK(mc.bound == doctest::Approx(2.0 * std::sqrt(6.0 / 9.0)));
}

TEST_CASE("witness pair search accepts the degenerate draw immediately") {
    const Group g = Group::cyclic(16);
    const SubsetMask universe = SubsetMask::full(g);
    const SubsetMask x = random_fixed_size_subset(universe, 6, Seed{95, 1});
    const SubsetMask y = random_fixed_size_subset(universe, 8, Seed{95, 2});
    const SubsetMask a = random_subset_density_half(g, Seed{95, 3});
    const SignedIndicator f = signed_indicator(a);

    SubsampleParams params;
    params.group_size = 16;
    params.epsilon = 1.0;
    params.s = 6;
    params.t = 8;
    const WitnessSearchResult res = find_witness_pair(x, y, f, params, 10, Seed{95, 4});
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->attempts == 1);
    CHECK(res.witness->s_subset == x);
    CHECK(res.witness->t_subset == y);
    CHECK(res.witness->closeness_gap == doctest::Approx(0.0));
}

TEST_CASE("accepted witnesses pass independent recomputation") {
    const Group g = Group::cyclic(64);
    const SubsetMask universe = SubsetMask::full(g);
    int found = 0;
    for (int i = 0; i < 10; ++i) {
        const SubsetMask x = random_fixed_size_subset(universe, 32, Seed{96, std::uint64_t(3 * i)});
        const SubsetMask y =
            random_fixed_size_subset(universe, 48, Seed{96, std::uint64_t(3 * i + 1)});
        const SubsetMask a = random_subset_density_half(g, Seed{96, std::uint64_t(3 * i + 2)});
        const SignedIndicator f = signed_indicator(a);
        const SubsampleParams params = choose_subsample_params(64, 20.0, 32, 48);
        REQUIRE_FALSE(params.s_clamped);
        REQUIRE_FALSE(params.t_clamped);
        const WitnessSearchResult res =
            find_witness_pair(x, y, f, params, 64, Seed{97, std::uint64_t(i)});
        if (!res.witness) continue;
        ++found;
        const WitnessPair& w = *res.witness;
        CHECK(w.s_subset.cardinality() == params.s);
        CHECK(w.t_subset.cardinality() == params.t);
        CHECK(closeness_condition_holds(x, y, f, w.s_subset, w.t_subset));
        CHECK(energy_condition_holds(x, y, w.s_subset, w.t_subset));
        // Property (2): when the closeness limit is below eps, the gap is too.
        if (w.closeness_limit <= params.epsilon)
            CHECK(w.closeness_gap <= params.epsilon + 1e-12);
    }
    CHECK(found >= 8);  // acceptance is at least 1/3 per attempt, 64 attempts
}

TEST_CASE("exhausted witness search returns a failure report") {
    const Group g = Group::cyclic(16);
    const SubsetMask universe = SubsetMask::full(g);
    const SubsetMask x = random_fixed_size_subset(universe, 6, Seed{99, 1});
    const SubsetMask y = random_fixed_size_subset(universe, 8, Seed{99, 2});
    SignedIndicator f;
    f.values.assign(16, 1);
    SubsampleParams params;
    params.group_size = 16;
    params.epsilon = 1.0;
    params.s = 3;
    params.t = 3;
    const WitnessSearchResult res = find_witness_pair(x, y, f, params, 0, Seed{99, 3});
    CHECK_FALSE(res.witness.has_value());
    CHECK(res.attempts == 0);
    CHECK(res.acceptance_rate == 0.0);
}

TEST_CASE("witness search requires |X| <= |Y|") {
    const Group g = Group::cyclic(16);
    const SubsetMask universe = SubsetMask::full(g);
    const SubsetMask x = random_fixed_size_subset(universe, 8, Seed{98, 1});
    const SubsetMask y = random_fixed_size_subset(universe, 4, Seed{98, 2});
    SignedIndicator f;
    f.values.assign(16, 1);
    SubsampleParams params;
    params.group_size = 16;
    params.epsilon = 1.0;
    params.s = 2;
    params.t = 2;
    CHECK_THROWS_AS(find_witness_pair(x, y, f, params, 5, Seed{98, 3}), std::invalid_argument);
}

}  // TEST_SUITE
