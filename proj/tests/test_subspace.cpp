#include "doctest.h"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "lab/discrepancy.hpp"
#include "lab/subspace.hpp"
#include "lab/tail_bounds.hpp"

using namespace lab;

TEST_SUITE("subspace") {

TEST_CASE("canonical form identifies equal spans") {
    // {011, 101} and {011, 110} span the same plane in F_2^3.
    const auto a = make_subspace(3, {0b011, 0b101});
    const auto b = make_subspace(3, {0b011, 0b110});
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(*a == *b);

    CHECK_FALSE(make_subspace(3, {0b011, 0b011}).has_value());
    CHECK_FALSE(make_subspace(3, {0b110, 0b011, 0b101}).has_value());
}

TEST_CASE("subspace elements are the XOR span") {
    const auto v = make_subspace(4, {0b0011, 0b0100});
    REQUIRE(v.has_value());
    auto elems = subspace_elements(*v);
    std::sort(elems.begin(), elems.end());
    CHECK(elems == std::vector<std::uint32_t>{0b0000, 0b0011, 0b0100, 0b0111});
}

TEST_CASE("enumeration at n=2 k=1 gives the three lines") {
    const auto lines = enumerate_subspaces(2, 1, 100);
    REQUIRE(lines.size() == 3);
    std::set<std::vector<std::uint32_t>> spans;
    for (const auto& l : lines) {
        auto e = subspace_elements(l);
        std::sort(e.begin(), e.end());
        spans.insert(e);
    }
    CHECK(spans == std::set<std::vector<std::uint32_t>>{{0, 1}, {0, 2}, {0, 3}});
}

TEST_CASE("gaussian binomial counts") {
    CHECK(gaussian_binomial(2, 1) == 3);
    CHECK(gaussian_binomial(4, 2) == 35);
    CHECK(gaussian_binomial(6, 3) == 1395);
    CHECK(gaussian_binomial(5, 0) == 1);
    CHECK(gaussian_binomial(3, 5) == 0);
}

TEST_CASE("enumeration emits exactly the gaussian binomial with no duplicates") {
    for (std::uint32_t n = 1; n <= 8; ++n) {
        for (std::uint32_t k = 0; k <= n; ++k) {
            std::set<std::vector<std::uint64_t>> seen;
            std::uint64_t count = 0;
            for_each_subspace(n, k, [&](const SubspaceBasis& b) {
                ++count;
                REQUIRE(b.k == k);
                REQUIRE(seen.insert(b.rows).second);
                // Canonicalizing the rows reproduces the same basis.
                const auto canon = make_subspace(n, b.rows);
                REQUIRE(canon.has_value());
                REQUIRE(*canon == b);
            });
            REQUIRE(mpz_class(count) == gaussian_binomial(n, k));
        }
    }
}

TEST_CASE("k=0 enumerates only the zero subspace") {
    const auto zero = enumerate_subspaces(5, 0, 10);
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].rows.empty());
    CHECK(subspace_elements(zero[0]) == std::vector<std::uint32_t>{0});
}

TEST_CASE("subspace counts dominate the 2^{nk-k^2} bound") {
    for (std::uint32_t n = 1; n <= 6; ++n)
        for (std::uint32_t k = 0; k <= n; ++k) {
            const SubspaceCount c = count_subspaces(n, k);
            REQUIRE(c.exact >= c.lower_bound);
        }
    const SubspaceCount c21 = count_subspaces(2, 1);
    CHECK(c21.exact == 3);
    CHECK(c21.lower_bound == 2);
    const SubspaceCount c42 = count_subspaces(4, 2);
    CHECK(c42.exact == 35);
    CHECK(c42.lower_bound == 16);
}

TEST_CASE("intersection profile values at n=2 k=1") {
    const auto profile = intersection_profile(2, 1, 1000);
    REQUIRE(profile.size() == 2);
    CHECK(profile[0] == 6);  // ordered distinct line pairs
    CHECK(profile[1] == 3);  // the diagonal
}

TEST_CASE("intersection profile matches the closed formula and partitions the square") {
    for (std::uint32_t n = 1; n <= 5; ++n) {
        for (std::uint32_t k = 1; k <= n; ++k) {
            const auto profile = intersection_profile(n, k, 10'000'000);
            mpz_class sum = 0;
            for (std::uint32_t l = 0; l <= k; ++l) {
                REQUIRE(profile[l] == intersection_pairs_formula(n, k, l));
                sum += profile[l];
            }
            const mpz_class count = gaussian_binomial(n, k);
            REQUIRE(sum == count * count);
        }
    }
}

TEST_CASE("intersection pair counts respect the 2^{2nk-nl} bound") {
    for (std::uint32_t n = 1; n <= 6; ++n)
        for (std::uint32_t k = 1; k <= n; ++k)
            for (std::uint32_t l = 0; l <= k; ++l) {
                const IntersectionPairCount c = count_intersection_pairs(n, k, l, 10'000'000);
                REQUIRE(c.exact <= c.upper_bound);
                if (l == k) REQUIRE(c.exact == gaussian_binomial(n, k));
            }
}

TEST_CASE("formula fallback beyond the enumeration budget") {
    const IntersectionPairCount c = count_intersection_pairs(6, 3, 1, 10);
    CHECK_FALSE(c.enumerated);
    CHECK(c.exact == intersection_pairs_formula(6, 3, 1));
}

TEST_CASE("dense subspace search extremes") {
    const Group cube = Group::boolean_cube(4);
    const SubsetMask everything = SubsetMask::full(cube);
    const auto all = dense_subspace_search(everything, 2, 0.2, ScanMode::exhaustive, 1000,
                                           Seed{1, 1});
    CHECK(all.size() == 35);
    for (const auto& w : all) CHECK(w.hits == 4);

    const SubsetMask nothing(cube);
    const auto none =
        dense_subspace_search(nothing, 2, 0.2, ScanMode::exhaustive, 1000, Seed{1, 1});
    CHECK(none.empty());
}

TEST_CASE("dense subspace search equals an independent scan") {
    const Group cube = Group::boolean_cube(6);
    const SubsetMask a = random_subset_density_half(cube, Seed{100, 3});
    const double eps = 0.25;
    const std::uint32_t k = 3;
    const auto found = dense_subspace_search(a, k, eps, ScanMode::exhaustive, 2000, Seed{0, 0});

    // Oracle: walk the enumeration and count hits by hand.
    const std::uint32_t threshold = 6;  // ceil(0.75 * 8)
    CHECK(dense_threshold(k, eps) == threshold);
    std::vector<SubspaceBasis> expect;
    for (const auto& b : enumerate_subspaces(6, 3, 2000)) {
        std::uint32_t hits = 0;
        for (std::uint32_t e : subspace_elements(b)) hits += a.test(e);
        if (hits >= threshold) expect.push_back(b);
    }
    REQUIRE(found.size() == expect.size());
    for (std::size_t i = 0; i < found.size(); ++i) {
        CHECK(found[i].basis == expect[i]);
        std::uint32_t hits = 0;
        for (std::uint32_t e : subspace_elements(found[i].basis)) hits += a.test(e);
        CHECK(found[i].hits == hits);
        CHECK(hits >= threshold);
    }

    // Sampled mode yields a subset of the exhaustive witnesses.
    const auto sampled = dense_subspace_search(a, k, eps, ScanMode::sampled, 500, Seed{7, 7});
    for (const auto& w : sampled)
        CHECK(std::find_if(expect.begin(), expect.end(),
                           [&](const SubspaceBasis& b) { return b == w.basis; }) != expect.end());
}

TEST_CASE("budget gates raise instead of running away") {
    CHECK_THROWS_AS(enumerate_subspaces(8, 4, 10), std::invalid_argument);
    CHECK_THROWS_AS(intersection_profile(6, 3, 100), std::invalid_argument);
    const Group cube = Group::boolean_cube(8);
    const SubsetMask a = random_subset_density_half(cube, Seed{1, 1});
    CHECK_THROWS_AS(dense_subspace_search(a, 4, 0.2, ScanMode::exhaustive, 10, Seed{1, 1}),
                    std::invalid_argument);
}

TEST_CASE("pair counting over a subspace reduces to |X| |A cap X|") {
    const Group cube = Group::boolean_cube(6);
    const SubsetMask a = random_subset_density_half(cube, Seed{120, 4});
    SplitMix64 rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint32_t k = 1 + std::uint32_t(rng.next_below(4));
        std::vector<std::uint64_t> vecs(k);
        std::optional<SubspaceBasis> v;
        do {
            for (auto& w : vecs) w = rng.next_below(64);
            v = make_subspace(6, vecs);
        } while (!v);
        SubsetMask vm(cube);
        std::uint32_t in_a = 0;
        for (std::uint32_t e : subspace_elements(*v)) {
            vm.set(e);
            in_a += a.test(e);
        }
        REQUIRE(count_pairs(vm, vm, a) == std::int64_t(vm.cardinality()) * in_a);
    }
}

TEST_CASE("second moment parameters") {
    CHECK(second_moment_k(12, 1) == 6);
    CHECK(second_moment_k(6, 0) == 3);
    CHECK(second_moment_feasible(1, 0.18));
    CHECK_FALSE(second_moment_feasible(1, 0.30));
}

TEST_CASE("second moment experiment on a small exhaustive instance") {
    SecondMomentConfig config;
    config.n = 6;
    config.c = 0;
    config.epsilon = 0.2;
    config.trials = 30;
    config.seed = Seed{11, 12};
    config.mode = ScanMode::exhaustive;
    config.budget = 2000;
    const SecondMomentReport rep = second_moment_experiment(config);
    CHECK(rep.k == 3);
    CHECK(rep.subspace_size == 8);
    CHECK(rep.threshold == 6);
    CHECK(rep.reference == doctest::Approx(0.49));
    CHECK(rep.witnesses_per_trial.size() == 30);
    CHECK(rep.p_zero >= 0.0);
    CHECK(rep.p_zero <= 1.0);
    CHECK(rep.wilson_low <= rep.p_zero + 1e-12);
    CHECK(rep.wilson_high >= rep.p_zero - 1e-12);

    // Reproduce one trial by hand from the same seeds.
    const Group cube = Group::boolean_cube(6);
    const SubsetMask a0 = random_subset_density_half(cube, substream(config.seed, 0));
    const auto witnesses =
        dense_subspace_search(a0, 3, 0.2, ScanMode::exhaustive, 2000, substream(config.seed, 1'000'000));
    CHECK(rep.witnesses_per_trial[0] == witnesses.size());
}

TEST_CASE("sumset growth and failure modes") {
    const Group g = Group::cyclic(32);
    const SumsetResult grow = sumset_search(SubsetMask::full(g), 32, 3, Seed{1, 1});
    CHECK(grow.best.cardinality() == 32);
    CHECK(grow.target_met);

    const Group cube = Group::boolean_cube(5);
    const SumsetResult empty_cube = sumset_search(SubsetMask(cube), 1, 3, Seed{1, 2});
    CHECK(empty_cube.best.cardinality() == 0);
    CHECK_FALSE(empty_cube.target_met);

    // 0 must lie in A for any nonempty X over the cube (x + x = 0).
    SubsetMask no_zero = SubsetMask::full(cube);
    no_zero.reset(0);
    CHECK(sumset_search(no_zero, 1, 3, Seed{1, 3}).best.cardinality() == 0);
}

TEST_CASE("sumset outputs always satisfy the sumset property") {
    const Group g = Group::cyclic(256);
    std::vector<std::uint32_t> sizes;
    for (int i = 0; i < 20; ++i) {
        const SubsetMask a = random_subset_density_half(g, Seed{110, std::uint64_t(i)});
        const SumsetResult res = sumset_search(a, 16, 20, Seed{111, std::uint64_t(i)});
        const auto elems = res.best.elements();
        for (std::uint32_t u : elems)
            for (std::uint32_t v : elems) REQUIRE(a.test(g.op(u, v)));
        sizes.push_back(res.best.cardinality());
    }
    std::sort(sizes.begin(), sizes.end());
    // Density-1/2 sets admit nontrivial sumset-closed subsets at this scale.
    CHECK(sizes.front() >= 2);
}

TEST_CASE("covariance terms exact values") {
    // K = 16, eps = 0.25, H = 12, Z ~ B(15, 1/2):
    // P(Z >= 11) = 1941/32768, P(Z >= 12) = 576/32768.
    const CovarianceTerms c = covariance_terms(4, 0.25);
    CHECK(c.subspace_size == 16);
    CHECK(c.threshold == 12);
    CHECK(c.p_k == mpq_class(2517, 65536));
    mpq_class want_ratio(1365 * 1365, 2517 * 2517);
    want_ratio.canonicalize();
    CHECK(c.ratio == want_ratio);
    CHECK_FALSE(c.degenerate);
    CHECK(c.ratio_below_reference);  // <= 0.5625

    // Degenerate small-K regime: K = 2, eps = 0.25 gives H = 2 and an empty
    // upper tail; the display ratio reaches 1.
    const CovarianceTerms d = covariance_terms(1, 0.25);
    CHECK(d.threshold == 2);
    CHECK(d.p_k == mpq_class(1, 4));
    CHECK(d.c_k0 == mpq_class(1, 16));
    CHECK(d.ratio == 1);
    CHECK(d.degenerate);
    CHECK_FALSE(d.ratio_below_reference);
}

TEST_CASE("covariance ratio stays below the reference on a grid") {
    for (std::uint32_t k : {4u, 6u, 8u}) {
        for (double eps : {0.1, 0.2, 0.3}) {
            const CovarianceTerms c = covariance_terms(k, eps);
            REQUIRE_FALSE(c.degenerate);
            REQUIRE(c.ratio_below_reference);
        }
    }
}

}  // TEST_SUITE
