#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "lab/rng.hpp"
#include "lab/tail_bounds.hpp"

using namespace lab;

TEST_SUITE("tail_bounds") {

TEST_CASE("rate function values and domain") {
    CHECK(rate_function(0.0) == 0.0);
    CHECK(rate_function(0.25) == doctest::Approx(0.75 * std::log(1.5) + 0.25 * std::log(0.5)));
    CHECK(rate_function(0.25) == doctest::Approx(0.130812).epsilon(1e-5));
    CHECK(rate_function(0.1) == doctest::Approx(0.020136).epsilon(1e-4));
    CHECK(rate_function(0.4999999) == doctest::Approx(std::log(2.0)).epsilon(1e-4));
    CHECK_THROWS_AS(rate_function(-0.01), std::domain_error);
    CHECK_THROWS_AS(rate_function(0.5), std::domain_error);
}

TEST_CASE("rate function is increasing and convex on a grid") {
    double prev = rate_function(0.01);
    double prev_diff = -1;
    for (double x = 0.02; x < 0.5; x += 0.01) {
        const double cur = rate_function(x);
        CHECK(cur > prev);
        const double diff = cur - prev;
        if (prev_diff >= 0) CHECK(diff >= prev_diff);
        prev_diff = diff;
        prev = cur;
    }
}

TEST_CASE("exact binomial tails") {
    CHECK(binomial_tail_exact(2, 1) == mpq_class(3, 4));
    CHECK(binomial_tail_exact(4, 4) == mpq_class(1, 16));
    CHECK(binomial_tail_exact(10, 0) == 1);
    CHECK(binomial_tail_exact(10, 11) == 0);
    // 176/1024 at n = 10, threshold 7.
    CHECK(binomial_tail_exact(10, 7) == mpq_class(11, 64));
}

TEST_CASE("tail symmetry P(Z >= k) = P(Z <= n-k)") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 30; ++trial) {
        const std::uint64_t n = 1 + rng.next_below(60);
        const std::uint64_t k = rng.next_below(n + 1);
        const mpq_class upper = binomial_tail_exact(n, k);
        // P(Z <= n-k) = 1 - P(Z >= n-k+1)
        const mpq_class lower = 1 - binomial_tail_exact(n, n - k + 1);
        REQUIRE(upper == lower);
    }
}

TEST_CASE("threshold snapping hits the intended integers") {
    CHECK(tail_threshold(0.05, 20) == 11);   // (0.55)(20) = 11 exactly
    CHECK(tail_threshold(0.1, 10) == 6);
    CHECK(tail_threshold(0.25, 2) == 2);     // ceil(1.5)
    CHECK(tail_threshold(0.2, 10) == 7);
    CHECK(tail_threshold(0.3, 1024) == 820); // ceil(819.2)
}

TEST_CASE("upper bound holds with exact comparison") {
    const BinomialBounds b = binomial_bounds_check(100, 0.1);
    CHECK(b.threshold == 60);
    CHECK(b.upper_holds);
    CHECK(b.exact_log < b.upper_log);
    CHECK(b.lower_slack >= 0.0);

    const BinomialBounds tiny = binomial_bounds_check(1, 0.45);
    CHECK(tiny.threshold == 1);
    CHECK(tiny.exact == mpq_class(1, 2));
    CHECK(tiny.upper_holds);

    CHECK_THROWS_AS(binomial_bounds_check(10, 0.0), std::domain_error);
    CHECK_THROWS_AS(binomial_bounds_check(10, 0.5), std::domain_error);
}

TEST_CASE("upper bound survives the deep-tail log-space branch") {
    // n h(eps) > 700 forces the log-space comparison.
    const BinomialBounds b = binomial_bounds_check(4000, 0.45);
    CHECK(b.upper_holds);
    CHECK(b.exact_log < -700.0);
}

TEST_CASE("sweep agrees with single checks and has no violations") {
    const double grid[] = {0.1, 0.3};
    std::uint64_t seen = 0;
    binomial_tail_sweep(200, grid, [&](const TailGridPoint& pt) {
        ++seen;
        REQUIRE(pt.upper_holds);
        REQUIRE(pt.lower_slack >= -1e-12);
        if (pt.n == 100 && pt.epsilon == 0.1) {
            const BinomialBounds b = binomial_bounds_check(100, 0.1);
            CHECK(pt.threshold == b.threshold);
            CHECK(pt.exact_log == doctest::Approx(b.exact_log).epsilon(1e-12));
        }
    });
    CHECK(seen == 400);
}

TEST_CASE("binomial exact certificate round-trips through its log") {
    for (auto [n, th] : {std::pair<std::uint64_t, std::uint64_t>{100, 60}, {500, 300}}) {
        const TailCertificate cert = binomial_exact_certificate(n, th);
        const mpq_class exact = binomial_tail_exact(n, th);
        const double round_trip = std::exp(cert.log_bound);
        CHECK(std::abs(round_trip - exact.get_d()) <= 1e-12 * exact.get_d());
    }
}

TEST_CASE("hoeffding certificate") {
    const double norms1[] = {1.0, 1.0, 1.0};
    const TailCertificate zero = hoeffding_bound(norms1, 0.0);
    CHECK(zero.log_bound == 0.0);  // bound 1
    const TailCertificate two = hoeffding_bound(norms1, 2.0);
    CHECK(two.log_bound == doctest::Approx(-2.0));
    CHECK(two.inputs.at("deviation_threshold").get<double>() ==
          doctest::Approx(2.0 * std::sqrt(3.0)));
    CHECK(two.inputs.at("constant_convention").get<int>() == 1);
    const double bad[] = {-1.0};
    CHECK_THROWS_AS(hoeffding_bound(bad, 1.0), std::invalid_argument);
}

TEST_CASE("hoeffding bound versus simulated sums") {
    // n fair +-1 summands; empirical P(|sum| >= 3 sqrt(n)) should sit well
    // under 3 e^{-4.5}.
    const int n = 400;
    const int trials = 100000;
    int exceed = 0;
    for (int t = 0; t < trials; ++t) {
        SplitMix64 rng(Seed{70, std::uint64_t(t)});
        int sum = 0;
        for (int i = 0; i < n; ++i) sum += rng.next_bool() ? 1 : -1;
        if (std::abs(sum) >= 3 * std::sqrt(double(n))) ++exceed;
    }
    const double freq = double(exceed) / trials;
    CHECK(freq <= 3.0 * std::exp(-4.5));
}

TEST_CASE("union bound arithmetic") {
    const std::uint32_t n = 256;
    const double eps = 1.0;
    const std::uint64_t t = 8;
    const double log_n = std::log(256.0);
    const double ratio = 2.0 * 6.0 * 8.0 * log_n;
    const UnionBoundReport rep = main_union_bound(n, eps, t, ratio);
    CHECK(rep.per_pair_log_bound == doctest::Approx(-6.0 * 8.0 * log_n));
    CHECK(rep.net_log_bound == doctest::Approx(-(2.0 * 3.0 - 2.0) * 8.0 * log_n));
    CHECK(rep.applicable);

    const UnionBoundReport off = main_union_bound(n, eps, t, 1.0);
    CHECK_FALSE(off.applicable);
    CHECK_THROWS_AS(main_union_bound(n, eps, 0, ratio), std::invalid_argument);
    CHECK_THROWS_AS(main_union_bound(n, -1.0, t, ratio), std::invalid_argument);
}

TEST_CASE("binomial upper certificate carries -n h(eps)") {
    const TailCertificate cert = binomial_upper_certificate(100, 0.1);
    CHECK(cert.kind == TailCertificate::Kind::binomial_upper);
    CHECK(cert.log_bound == doctest::Approx(-100.0 * rate_function(0.1)));
    CHECK(cert.inputs.at("threshold").get<std::uint64_t>() == 60);
    // The certified bound really dominates the exact tail.
    CHECK(binomial_tail_exact(100, 60).get_d() <= std::exp(cert.log_bound));
}

TEST_CASE("union bound certificate folds the pair count in") {
    const double ratio = 2.0 * 6.0 * 8.0 * std::log(256.0);
    const TailCertificate cert = union_bound_certificate(256, 1.0, 8, ratio);
    CHECK(cert.kind == TailCertificate::Kind::union_bound);
    CHECK(cert.log_bound == doctest::Approx(-(2.0 * 3.0 - 2.0) * 8.0 * std::log(256.0)));
    CHECK(cert.inputs.at("applicable").get<bool>());
}

TEST_CASE("exact threshold case per-pair bound") {
    // energy ratio exactly 6 |T| log N / eps^2 gives the -3 |T| log N rate.
    const std::uint32_t n = 64;
    const double eps = 0.5;
    const std::uint64_t t = 4;
    const double ratio = 6.0 * double(t) * std::log(64.0) / (eps * eps);
    const UnionBoundReport rep = main_union_bound(n, eps, t, ratio);
    CHECK(rep.per_pair_log_bound == doctest::Approx(-3.0 * double(t) * std::log(64.0)));
    CHECK(rep.applicable);
}

}  // TEST_SUITE
