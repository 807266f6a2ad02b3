#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "lab/group.hpp"

namespace lab {

// A distribution on {0..universe-1} with exact rational probabilities.
struct FiniteDistribution {
    std::uint64_t universe = 0;
    std::vector<mpq_class> probs;
};

void validate_distribution(const FiniteDistribution& dist);

bool is_point_mass(const FiniteDistribution& dist);
bool is_uniform(const FiniteDistribution& dist);

// Normalized min-entropy: min over support points of log(1/p), divided by
// log(universe). Zero-probability points are excluded (log 1/0 can never be
// the min). 0 for point masses, 1 for uniform. universe must be >= 2.
double min_entropy(const FiniteDistribution& dist);

// Uniform on a subset of the group.
struct FlatSource {
    SubsetMask support;
};

FiniteDistribution flat_distribution(const FlatSource& source);
double flat_entropy(const FlatSource& source);  // log|support| / log N

// Distribution of 1_A(xy) for independent flat X, Y:
// P(1) = count_pairs / (|supp X| |supp Y|), exact.
FiniteDistribution output_distribution(const SubsetMask& a, const FlatSource& x,
                                       const FlatSource& y);

// Entropy of a Bernoulli output, base-2 normalization.
double output_entropy(const mpq_class& p_one);

enum class CertifyMode { exhaustive, search };

struct ExtractorCertificate {
    double entropy_floor = 0;
    double c = 0;
    bool verdict = false;  // worst_output_entropy > c
    SubsetMask worst_x;
    SubsetMask worst_y;
    double worst_output_entropy = 0;
    mpq_class worst_p_one;
    CertifyMode mode = CertifyMode::exhaustive;
    std::uint32_t support_floor = 0;  // smallest admissible support size
    std::uint64_t evaluations = 0;
};

// Certifies (x,y) -> 1_A(xy) over flat sources with entropy above the floor.
// Exhaustive mode scans every admissible support pair (the certificate is
// exact); search mode reuses the adversarial pair search and its verdict is
// an upper-bound claim only. Output entropy is monotone decreasing in the
// pair deviation, so the worst pair is the deviation maximizer.
ExtractorCertificate certify_extractor(const SubsetMask& a, double entropy_floor, double c,
                                       CertifyMode mode, std::uint64_t budget, Seed seed);

// Smallest support size k with log k / log N > entropy_floor.
std::uint32_t support_floor(std::uint32_t group_size, double entropy_floor);

// First member of the first unequal pair at even index 0, 2, 4, ...; none if
// every pair matches or the tail is too short.
std::optional<int> von_neumann(std::span<const std::uint8_t> bits);

struct VnBiasReport {
    double empirical_p_one = 0;
    double stderr_estimate = 0;
    std::uint64_t accepted = 0;
    std::uint64_t discarded = 0;  // streams with no unequal pair
};

// Feeds iid Bernoulli(q) streams (truncated at max_pairs pairs, no-decision
// streams discarded) and estimates P(output = 1); unbiased for any q.
VnBiasReport von_neumann_bias(double q, std::uint64_t accepted_target, Seed seed,
                              std::uint32_t max_pairs = 64);

}  // namespace lab
