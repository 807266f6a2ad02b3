#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

namespace lab {

// Upper-tail rate function of B(n, 1/2) at threshold (1/2+x)n:
// h(x) = (1/2+x) log(1+2x) + (1/2-x) log(1-2x), natural logs, 0 <= x < 1/2.
double rate_function(double x);

// ceil((1/2+eps)*n) with a small snap so decimal grids (0.05, 0.10, ...)
// land on the mathematically intended integer.
std::uint64_t tail_threshold(double eps, std::uint64_t n);

// Exact P(Z >= threshold) for Z ~ B(n, 1/2) as a big rational. threshold may
// be n+1 (empty tail).
mpq_class binomial_tail_exact(std::uint64_t n, std::uint64_t threshold);

// Natural log of a positive rational whose parts may exceed double range.
double log_rational(const mpq_class& q);

struct BinomialBounds {
    std::uint64_t n = 0;
    std::uint64_t threshold = 0;
    double epsilon = 0;
    mpq_class exact;      // exact tail
    double exact_log = 0; // log of the exact tail
    double upper_log = 0; // -n h(eps)
    double lower_slack = 0; // (-log exact - n h(eps)) / log n, n >= 2
    bool upper_holds = false; // exact <= e^{-n h(eps)}, directed rounding
};

BinomialBounds binomial_bounds_check(std::uint64_t n, double eps);

struct TailGridPoint {
    std::uint64_t n;
    double epsilon;
    std::uint64_t threshold;
    double exact_log;
    double upper_log;
    double lower_slack;
    bool upper_holds;
};

// Visits every (n, eps) in {1..n_max} x eps_grid, sharing binomial rows
// across the grid so the full sweep stays fast.
void binomial_tail_sweep(std::uint64_t n_max, std::span<const double> eps_grid,
                         const std::function<void(const TailGridPoint&)>& visit);

struct TailCertificate {
    enum class Kind { hoeffding, binomial_upper, binomial_exact, union_bound };
    Kind kind = Kind::hoeffding;
    nlohmann::json inputs;
    double log_bound = 0;  // natural log of the probability bound
};

// P(|sum X_i| >= lambda sqrt(sum ||X_i||_inf^2)) <= exp(-lambda^2/2); the
// suppressed constant is pinned to 1 and recorded in the certificate.
TailCertificate hoeffding_bound(std::span<const double> sup_norms, double lambda);

TailCertificate binomial_exact_certificate(std::uint64_t n, std::uint64_t threshold);

// e^{-n h(eps)} as a certificate for P(Z >= ceil((1/2+eps)n)).
TailCertificate binomial_upper_certificate(std::uint64_t n, double eps);

struct UnionBoundReport {
    double per_pair_log_bound = 0;  // -eps^2 ratio / 2
    double count_log = 0;           // 2 |T| log N, crude count of pairs
    double net_log_bound = 0;       // count_log + per_pair_log_bound
    double required_ratio = 0;      // 6 |T| log N / eps^2
    bool applicable = false;        // energy_ratio >= required_ratio
};

// Union-bound arithmetic over pairs of fixed sizes given the energy ratio
// |S|^2|T|^2 / (N^3 ||1_S * 1_T||_2^2).
UnionBoundReport main_union_bound(std::uint32_t n_group, double eps, std::uint64_t t_size,
                                  double energy_ratio);

TailCertificate union_bound_certificate(std::uint32_t n_group, double eps, std::uint64_t t_size,
                                        double energy_ratio);

}  // namespace lab
