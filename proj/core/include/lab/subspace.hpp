#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "lab/group.hpp"

namespace lab {

// A k-dimensional subspace of F_2^n in reduced row echelon form: rows are
// n-bit vectors ordered by strictly decreasing pivot (most significant set
// bit), and each pivot bit appears in exactly one row. Two bases are equal
// iff they span the same subspace.
struct SubspaceBasis {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::vector<std::uint64_t> rows;

    bool operator==(const SubspaceBasis& other) const {
        return n == other.n && rows == other.rows;
    }
    bool operator<(const SubspaceBasis& other) const { return rows < other.rows; }
};

// Canonicalizes a spanning set; nullopt if the vectors do not span a
// k = vectors.size() dimensional space.
std::optional<SubspaceBasis> make_subspace(std::uint32_t n, std::vector<std::uint64_t> vectors);

// RREF basis of the span, whatever its dimension.
SubspaceBasis span_basis(std::uint32_t n, const std::vector<std::uint64_t>& vectors);

// All 2^k elements of the subspace as group indices (XOR combinations).
std::vector<std::uint32_t> subspace_elements(const SubspaceBasis& basis);

std::uint32_t subspace_intersection_dim(const SubspaceBasis& a, const SubspaceBasis& b);

// Number of k-dimensional subspaces of F_2^n.
mpz_class gaussian_binomial(std::uint32_t n, std::uint32_t k);

// Visits each k-dimensional subspace exactly once in a fixed canonical order
// (pivot combinations, then free-entry odometer).
void for_each_subspace(std::uint32_t n, std::uint32_t k,
                       const std::function<void(const SubspaceBasis&)>& visit);

// Materialized enumeration, gated by `budget` subspaces.
std::vector<SubspaceBasis> enumerate_subspaces(std::uint32_t n, std::uint32_t k,
                                               std::uint64_t budget);

struct SubspaceCount {
    mpz_class exact;        // Gaussian binomial
    mpz_class lower_bound;  // 2^{nk - k^2}
};

SubspaceCount count_subspaces(std::uint32_t n, std::uint32_t k);

// Ordered pairs (V, W) of k-dimensional subspaces with dim(V cap W) = l for
// every l at once, by exhaustive pairwise intersection rank.
std::vector<mpz_class> intersection_profile(std::uint32_t n, std::uint32_t k,
                                            std::uint64_t budget);

// Closed form for the same count:
// I_k(n) * 2^{(k-l)^2} * gauss(k, l) * gauss(n-k, k-l).
mpz_class intersection_pairs_formula(std::uint32_t n, std::uint32_t k, std::uint32_t l);

struct IntersectionPairCount {
    mpz_class exact;
    mpz_class upper_bound;  // 2^{2nk - nl}
    bool enumerated = false;
};

// Enumerates when the pair count fits the budget, otherwise uses the closed
// form.
IntersectionPairCount count_intersection_pairs(std::uint32_t n, std::uint32_t k, std::uint32_t l,
                                               std::uint64_t budget);

enum class ScanMode { exhaustive, sampled };

struct DenseWitness {
    SubspaceBasis basis;
    std::uint32_t hits = 0;  // |A cap V|
};

// k-subspaces V with |A cap V| >= ceil((1/2+eps) 2^k). Exhaustive mode scans
// the full enumeration (budget-gated); sampled mode draws `count` random
// k-subspaces, deduplicated by canonical form, and yields a lower bound on
// the witness set.
std::vector<DenseWitness> dense_subspace_search(const SubsetMask& a, std::uint32_t k, double eps,
                                                ScanMode mode, std::uint64_t count, Seed seed);

std::uint32_t dense_threshold(std::uint32_t k, double eps);

struct SecondMomentConfig {
    std::uint32_t n = 12;
    int c = 1;
    double epsilon = 0.18;
    std::uint32_t trials = 200;
    Seed seed;
    ScanMode mode = ScanMode::sampled;
    std::uint64_t samples_per_trial = 2000;  // sampled mode
    std::uint64_t budget = 2'000'000;        // exhaustive mode
};

// k = floor(log2 n + log2 log2 n) + c.
std::uint32_t second_moment_k(std::uint32_t n, int c);

// 2^{c+1} h(eps) < log 2.
bool second_moment_feasible(int c, double eps);

struct SecondMomentReport {
    SecondMomentConfig config;
    std::uint32_t k = 0;
    std::uint64_t subspace_size = 0;  // K = 2^k
    std::uint32_t threshold = 0;      // H = ceil((1/2+eps) K)
    bool feasible = false;
    double reference = 0;  // (1/2+eps)^2
    std::uint32_t zero_trials = 0;
    double p_zero = 0;
    double wilson_low = 0;
    double wilson_high = 0;
    std::vector<std::uint32_t> witnesses_per_trial;
};

SecondMomentReport second_moment_experiment(const SecondMomentConfig& config);

struct SumsetResult {
    SubsetMask best;
    bool target_met = false;
    std::uint32_t target = 0;
    std::uint32_t restarts = 0;
};

// Greedy-with-restarts growth of X with X+X inside A (diagonal included: 2x,
// resp. x XOR x = 0, must lie in A).
SumsetResult sumset_search(const SubsetMask& a, std::uint32_t target_size,
                           std::uint32_t restarts, Seed seed);

struct CovarianceTerms {
    std::uint64_t subspace_size = 0;  // K = 2^k
    std::uint32_t threshold = 0;      // H
    mpq_class p_k;                    // (P(Z>=H-1) + P(Z>=H)) / 2, Z ~ B(K-1, 1/2)
    mpq_class c_k0;                   // ((P(Z>=H-1) - P(Z>=H)) / 2)^2
    mpq_class ratio;                  // c_k0 / p_k^2
    bool degenerate = false;          // P(Z >= H) = 0: small-K regime, display fails
    bool ratio_below_reference = false;  // ratio <= (1/2+eps)^2
};

// Exact zero-intersection covariance term of the dense-subspace count,
// conditioned on whether 0 (the shared element) lands in A.
CovarianceTerms covariance_terms(std::uint32_t k, double eps);

}  // namespace lab
