#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lab/discrepancy.hpp"
#include "lab/fourier.hpp"

using namespace lab;

namespace {

// Naive reference DFT, written independently of the library path.
std::vector<std::complex<double>> reference_dft(const std::vector<double>& f) {
    const std::size_t n = f.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t r = 0; r < n; ++r) {
        std::complex<double> acc = 0;
        for (std::size_t x = 0; x < n; ++x) {
            const double ang = 2.0 * std::numbers::pi * double(x) * double(r) / double(n);
            acc += f[x] * std::complex<double>{std::cos(ang), std::sin(ang)};
        }
        out[r] = acc / double(n);
    }
    return out;
}

std::vector<double> random_vector(std::size_t n, Seed seed) {
    SplitMix64 rng(seed);
    std::vector<double> f(n);
    for (auto& v : f) v = 2.0 * rng.next_unit() - 1.0;
    return f;
}

}  // namespace

TEST_SUITE("fourier") {

TEST_CASE("transform of constants and deltas") {
    for (const Group& g : {Group::cyclic(6), Group::boolean_cube(3)}) {
        const std::size_t n = g.size();
        std::vector<double> ones(n, 1.0);
        const Spectrum s = transform(ones, g);
        CHECK(std::abs(s.coeffs[0] - 1.0) < 1e-12);
        for (std::size_t r = 1; r < n; ++r) CHECK(std::abs(s.coeffs[r]) < 1e-12);

        std::vector<double> delta(n, 0.0);
        delta[g.identity()] = 1.0;
        const Spectrum d = transform(delta, g);
        for (std::size_t r = 0; r < n; ++r)
            CHECK(std::abs(d.coeffs[r] - 1.0 / double(n)) < 1e-12);
    }
}

TEST_CASE("shifted delta has flat modulus") {
    const Group g = Group::cyclic(4);
    std::vector<double> f{0, 1, 0, 0};
    const Spectrum s = transform(f, g);
    for (std::size_t r = 0; r < 4; ++r) CHECK(std::abs(s.coeffs[r]) == doctest::Approx(0.25));
}

TEST_CASE("table groups are rejected") {
    const Group g = Group::from_table({0, 1, 1, 0});
    std::vector<double> f{1, -1};
    CHECK_THROWS_AS(transform(f, g), std::invalid_argument);
    CHECK_THROWS_AS(fast_energy(SubsetMask::full(g), SubsetMask::full(g)),
                    std::invalid_argument);
}

TEST_CASE("parseval and inversion on random vectors") {
    const auto& tol = fourier_tolerances();
    std::vector<Group> groups;
    for (std::uint32_t n : {5u, 8u, 12u, 101u, 128u}) groups.push_back(Group::cyclic(n));
    for (std::uint32_t d : {2u, 5u, 6u}) groups.push_back(Group::boolean_cube(d));
    for (const Group& g : groups) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_vector(g.size(), Seed{40, std::uint64_t(trial) * 31 + g.size()});
            const Spectrum s = transform(f, g);
            double lhs = 0, rhs = 0;
            for (double v : f) rhs += v * v;
            rhs /= double(g.size());
            for (const auto& c : s.coeffs) lhs += std::norm(c);
            REQUIRE(std::abs(lhs - rhs) <= tol.parseval_rel * std::max(1.0, std::abs(rhs)));

            const auto back = inverse_transform(s);
            for (std::size_t i = 0; i < f.size(); ++i)
                REQUIRE(std::abs(back[i] - f[i]) <= tol.inversion_abs);
        }
    }
}

TEST_CASE("direct and fast paths agree on overlapping sizes") {
    for (std::uint32_t n : {2u, 3u, 5u, 12u, 16u, 100u, 101u, 255u, 256u, 1000u, 1024u, 2048u}) {
        const auto f = random_vector(n, Seed{41, n});
        std::vector<std::complex<double>> cf(f.begin(), f.end());
        const auto direct = detail::dft_direct(cf, +1);
        const auto fast = detail::fft_any(cf, +1);
        for (std::uint32_t r = 0; r < n; ++r)
            REQUIRE(std::abs(direct[r] - fast[r]) <= 1e-9 * double(n));
    }
}

TEST_CASE("quadratic character is multiplicative with zero at 0") {
    for (std::uint32_t p : {3u, 5u, 17u, 101u, 997u}) {
        const QuadraticCharacter chi = quadratic_character(p);
        CHECK(chi.at(0) == 0);
        std::int64_t sum = 0;
        for (std::uint32_t a = 0; a < p; ++a) sum += chi.at(a);
        CHECK(sum == 0);
        for (std::uint32_t a = 1; a < p; ++a)
            for (std::uint32_t b = 1; b < p; ++b)
                REQUIRE(chi.at(std::uint32_t((std::uint64_t(a) * b) % p)) ==
                        chi.at(a) * chi.at(b));
    }
    CHECK_THROWS_AS(quadratic_character(15), std::invalid_argument);
}

TEST_CASE("gauss sum profile is flat at p^{-1/2}") {
    const auto& tol = fourier_tolerances();
    for (std::uint32_t p : {3u, 5u, 13u, 101u}) {
        const auto profile = gauss_sum_profile(p);
        CHECK(profile[0] <= tol.gauss_zero_abs);
        const double expected = 1.0 / std::sqrt(double(p));
        for (std::uint32_t r = 1; r < p; ++r)
            REQUIRE(std::abs(profile[r] - expected) <= tol.gauss_nonzero_abs);
    }
    const auto p5 = gauss_sum_profile(5);
    CHECK(p5[1] == doctest::Approx(1.0 / std::sqrt(5.0)));
    const auto p3 = gauss_sum_profile(3);
    CHECK(p3[2] == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("spectral bound specializes to sqrt(p|X||Y|) for the character") {
    const std::uint32_t p = 13;
    const Group g = Group::cyclic(p);
    const QuadraticCharacter chi = quadratic_character(p);
    std::vector<double> chi_values(p);
    for (std::uint32_t i = 0; i < p; ++i) chi_values[i] = chi.at(i);

    const SubsetMask x = SubsetMask::of(g, {1, 2, 3});
    const SubsetMask y = SubsetMask::of(g, {0, 5, 11});
    const FourierBoundReport rep = fourier_discrepancy_bound(x, y, chi_values);
    CHECK(rep.sup_bound == doctest::Approx(std::sqrt(13.0 * 9.0)).epsilon(1e-9));
    CHECK(rep.verified);

    // Battery: the bound and the Cauchy-Schwarz intermediate dominate the
    // exact left side on every instance.
    for (int trial = 0; trial < 1000; ++trial) {
        SplitMix64 rng(Seed{50, std::uint64_t(trial)});
        SubsetMask xs(g), ys(g);
        const std::uint32_t sx = 2 + std::uint32_t(rng.next_below(5));
        const std::uint32_t sy = 2 + std::uint32_t(rng.next_below(5));
        while (xs.cardinality() < sx) xs.set(std::uint32_t(rng.next_below(p)));
        while (ys.cardinality() < sy) ys.set(std::uint32_t(rng.next_below(p)));
        const FourierBoundReport r = fourier_discrepancy_bound(xs, ys, chi_values);
        REQUIRE(r.verified);
        REQUIRE(r.lhs_abs <=
                std::sqrt(13.0 * xs.cardinality() * ys.cardinality()) * (1 + 1e-12) + 1e-9);
        REQUIRE(r.lhs_abs <= r.cs_sup_profile * (1 + 1e-12) + 1e-9);
        REQUIRE(r.cs_exact <= r.cs_sup_profile * (1 + 1e-12) + 1e-9);
    }
}

TEST_CASE("spectral bound equality case for constant f") {
    const Group g = Group::cyclic(11);
    const SubsetMask x = SubsetMask::of(g, {0, 1, 2});
    const SubsetMask y = SubsetMask::of(g, {4, 7});
    std::vector<double> ones(11, 1.0);
    const FourierBoundReport rep = fourier_discrepancy_bound(x, y, ones);
    // Sum of r(z) is |X||Y| exactly; the zero-mode term matches it.
    CHECK(rep.lhs_abs == doctest::Approx(6.0));
    CHECK(rep.zero_mode_term == doctest::Approx(6.0));
    CHECK(rep.lhs_abs <= rep.sup_bound + 1e-9);
}

TEST_CASE("spectral bound with singleton supports at zero") {
    const std::uint32_t p = 7;
    const Group g = Group::cyclic(p);
    const QuadraticCharacter chi = quadratic_character(p);
    std::vector<double> chi_values(p);
    for (std::uint32_t i = 0; i < p; ++i) chi_values[i] = chi.at(i);
    const SubsetMask zero = SubsetMask::of(g, {0});
    const FourierBoundReport rep = fourier_discrepancy_bound(zero, zero, chi_values);
    CHECK(rep.lhs_abs == doctest::Approx(0.0));  // chi(0) = 0
    CHECK(rep.verified);
}

TEST_CASE("fast energy equals direct energy exactly") {
    CHECK(fast_energy(SubsetMask::of(Group::cyclic(4), {0, 1}),
                      SubsetMask::of(Group::cyclic(4), {0, 1})) == 6);
    const Group f22 = Group::boolean_cube(2);
    CHECK(fast_energy(SubsetMask::full(f22), SubsetMask::full(f22)) == 64);

    const Group g9 = Group::cyclic(9);
    const SubsetMask e = SubsetMask::of(g9, {0});
    const SubsetMask y = SubsetMask::of(g9, {1, 3, 8});
    CHECK(fast_energy(e, y) == 3);  // r is a permuted indicator of Y

    std::vector<Group> groups{Group::cyclic(8),  Group::cyclic(12), Group::cyclic(64),
                              Group::cyclic(101), Group::boolean_cube(3),
                              Group::boolean_cube(6)};
    for (const Group& g : groups) {
        for (int i = 0; i < 10; ++i) {
            const SubsetMask x = random_subset_density_half(g, Seed{60, std::uint64_t(4 * i)});
            const SubsetMask yy = random_subset_density_half(g, Seed{60, std::uint64_t(4 * i + 1)});
            REQUIRE(fast_energy(x, yy) == energy(x, yy));
        }
    }
}

TEST_CASE("reference dft agrees with the library transform") {
    for (std::uint32_t n : {4u, 7u, 12u}) {
        const Group g = Group::cyclic(n);
        const auto f = random_vector(n, Seed{61, n});
        const Spectrum s = transform(f, g);
        const auto ref = reference_dft(f);
        for (std::uint32_t r = 0; r < n; ++r)
            REQUIRE(std::abs(s.coeffs[r] - ref[r]) < 1e-10);
    }
}

}  // TEST_SUITE
