#include "lab/extractor.hpp"

#include <cmath>
#include <stdexcept>

#include "lab/discrepancy.hpp"
#include "lab/search.hpp"
#include "lab/tail_bounds.hpp"

namespace lab {

void validate_distribution(const FiniteDistribution& dist) {
    if (dist.probs.size() != dist.universe)
        throw std::invalid_argument("probability vector length must equal the universe size");
    mpq_class sum = 0;
    for (const auto& p : dist.probs) {
        if (p < 0) throw std::invalid_argument("probabilities must be nonnegative");
        sum += p;
    }
    if (sum != 1) throw std::invalid_argument("probabilities must sum to one");
}

bool is_point_mass(const FiniteDistribution& dist) {
    for (const auto& p : dist.probs)
        if (p == 1) return true;
    return false;
}

bool is_uniform(const FiniteDistribution& dist) {
    const mpq_class u(1, static_cast<unsigned long>(dist.universe));
    for (const auto& p : dist.probs)
        if (p != u) return false;
    return true;
}

double min_entropy(const FiniteDistribution& dist) {
    if (dist.universe < 2)
        throw std::invalid_argument("min-entropy is undefined on a single-point universe");
    mpq_class p_max = 0;
    for (const auto& p : dist.probs)
        if (p > p_max) p_max = p;
    if (p_max <= 0) throw std::invalid_argument("distribution has empty support");
    if (p_max == 1) return 0.0;
    if (p_max == mpq_class(1, static_cast<unsigned long>(dist.universe))) return 1.0;
    return -log_rational(p_max) / std::log(double(dist.universe));
}

FiniteDistribution flat_distribution(const FlatSource& source) {
    const std::uint32_t card = source.support.cardinality();
    if (card == 0) throw std::invalid_argument("flat source needs a nonempty support");
    FiniteDistribution dist;
    dist.universe = source.support.universe_size();
    dist.probs.assign(dist.universe, mpq_class(0));
    const mpq_class p(1, card);
    for (std::uint32_t e : source.support.elements()) dist.probs[e] = p;
    return dist;
}

double flat_entropy(const FlatSource& source) {
    const std::uint32_t card = source.support.cardinality();
    if (card == 0) throw std::invalid_argument("flat source needs a nonempty support");
    return std::log(double(card)) / std::log(double(source.support.universe_size()));
}

FiniteDistribution output_distribution(const SubsetMask& a, const FlatSource& x,
                                       const FlatSource& y) {
    if (x.support.cardinality() == 0 || y.support.cardinality() == 0)
        throw std::invalid_argument("flat sources need nonempty supports");
    const std::int64_t count = count_pairs(x.support, y.support, a);
    const mpz_class total = mpz_class(x.support.cardinality()) * y.support.cardinality();
    mpq_class p_one(count, total);
    p_one.canonicalize();
    FiniteDistribution dist;
    dist.universe = 2;
    dist.probs = {1 - p_one, p_one};
    return dist;
}

double output_entropy(const mpq_class& p_one) {
    if (p_one < 0 || p_one > 1) throw std::invalid_argument("probability out of range");
    const mpq_class p_max = std::max(p_one, mpq_class(1 - p_one));
    if (p_max == 1) return 0.0;
    if (p_max == mpq_class(1, 2)) return 1.0;
    return -log_rational(p_max) / std::log(2.0);
}

std::uint32_t support_floor(std::uint32_t group_size, double entropy_floor) {
    if (!(entropy_floor > 0.0) || entropy_floor >= 1.0)
        throw std::invalid_argument("entropy floor must lie in (0, 1)");
    const double log_n = std::log(double(group_size));
    for (std::uint32_t k = 1; k <= group_size; ++k)
        if (std::log(double(k)) / log_n > entropy_floor) return k;
    throw std::invalid_argument("no admissible support size for this entropy floor");
}

ExtractorCertificate certify_extractor(const SubsetMask& a, double entropy_floor, double c,
                                       CertifyMode mode, std::uint64_t budget, Seed seed) {
    const Group& g = a.group();
    const std::uint32_t n = g.size();
    const std::uint32_t k_min = support_floor(n, entropy_floor);

    ExtractorCertificate cert{entropy_floor, c,    false, SubsetMask(g), SubsetMask(g), 0,
                              mpq_class(0),  mode, k_min, 0};

    SearchOutcome outcome{SubsetMask(g), SubsetMask(g), 0, SearchMethod::exhaustive, 0};
    if (mode == CertifyMode::exhaustive) {
        // Scan work grows as (#admissible X masks) * N^2.
        double masks = 0, binom = 1;
        for (std::uint32_t j = 0; j <= n; ++j) {
            if (j >= k_min) masks += binom;
            binom = binom * double(n - j) / double(j + 1);
        }
        if (n > 30 || masks * double(n) * double(n) > double(budget))
            throw std::invalid_argument("exhaustive certification exceeds the budget; use search mode");
        outcome = exhaustive_worst_pair(a, k_min, k_min);
    } else {
        SearchConfig config;
        config.method = SearchMethod::anneal;
        config.min_size_x = k_min;
        config.min_size_y = k_min;
        config.budget = budget;
        config.seed = seed;
        outcome = worst_pair_search(a, config);
    }

    cert.worst_x = outcome.best_x;
    cert.worst_y = outcome.best_y;
    cert.evaluations = outcome.evaluations;
    const FiniteDistribution out_dist =
        output_distribution(a, FlatSource{cert.worst_x}, FlatSource{cert.worst_y});
    cert.worst_p_one = out_dist.probs[1];
    cert.worst_output_entropy = output_entropy(cert.worst_p_one);
    cert.verdict = cert.worst_output_entropy > c;
    return cert;
}

std::optional<int> von_neumann(std::span<const std::uint8_t> bits) {
    for (std::size_t m = 0; m + 1 < bits.size(); m += 2)
        if (bits[m] != bits[m + 1]) return int(bits[m]);
    return std::nullopt;
}

VnBiasReport von_neumann_bias(double q, std::uint64_t accepted_target, Seed seed,
                              std::uint32_t max_pairs) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::invalid_argument("bias q must lie strictly between 0 and 1");
    if (accepted_target < 1) throw std::invalid_argument("need at least one accepted output");

    VnBiasReport rep;
    std::uint64_t ones = 0;
    for (std::uint64_t stream = 0; rep.accepted < accepted_target; ++stream) {
        SplitMix64 rng(substream(seed, stream));
        bool decided = false;
        for (std::uint32_t pair = 0; pair < max_pairs; ++pair) {
            const bool b1 = rng.bernoulli(q);
            const bool b2 = rng.bernoulli(q);
            if (b1 != b2) {
                ++rep.accepted;
                ones += b1;
                decided = true;
                break;
            }
        }
        if (!decided) ++rep.discarded;
    }
    rep.empirical_p_one = double(ones) / double(rep.accepted);
    rep.stderr_estimate =
        std::sqrt(rep.empirical_p_one * (1.0 - rep.empirical_p_one) / double(rep.accepted));
    return rep;
}

}  // namespace lab
