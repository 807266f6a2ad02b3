#include "lab/subspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

#include "lab/tail_bounds.hpp"

namespace lab {

namespace {

// Insert into a pivot-indexed GF(2) basis; returns false if v is dependent.
bool basis_insert(std::vector<std::uint64_t>& pivot_rows, std::uint64_t v) {
    while (v) {
        const int p = 63 - std::countl_zero(v);
        if (pivot_rows[p] == 0) {
            pivot_rows[p] = v;
            return true;
        }
        v ^= pivot_rows[p];
    }
    return false;
}

SubspaceBasis rref_from_pivot_rows(std::uint32_t n, std::vector<std::uint64_t>& pivot_rows) {
    // Back-substitute so every pivot bit appears in exactly one row.
    for (int p = 0; p < int(n); ++p) {
        if (!pivot_rows[p]) continue;
        for (int q = p + 1; q < int(n); ++q)
            if (pivot_rows[q] && ((pivot_rows[q] >> p) & 1u)) pivot_rows[q] ^= pivot_rows[p];
    }
    SubspaceBasis b;
    b.n = n;
    for (int p = int(n) - 1; p >= 0; --p)
        if (pivot_rows[p]) b.rows.push_back(pivot_rows[p]);
    b.k = static_cast<std::uint32_t>(b.rows.size());
    return b;
}

}  // namespace

SubspaceBasis span_basis(std::uint32_t n, const std::vector<std::uint64_t>& vectors) {
    if (n < 1 || n > 63) throw std::invalid_argument("ambient dimension out of range");
    std::vector<std::uint64_t> pivot_rows(n, 0);
    for (std::uint64_t v : vectors) {
        if (v >> n) throw std::invalid_argument("vector has bits beyond the ambient dimension");
        basis_insert(pivot_rows, v);
    }
    return rref_from_pivot_rows(n, pivot_rows);
}

std::optional<SubspaceBasis> make_subspace(std::uint32_t n, std::vector<std::uint64_t> vectors) {
    SubspaceBasis b = span_basis(n, vectors);
    if (b.k != vectors.size()) return std::nullopt;
    return b;
}

std::vector<std::uint32_t> subspace_elements(const SubspaceBasis& basis) {
    if (basis.k > 25) throw std::invalid_argument("subspace too large to materialize");
    std::vector<std::uint32_t> elems(std::size_t{1} << basis.k);
    elems[0] = 0;
    for (std::uint32_t i = 0; i < basis.k; ++i) {
        const std::size_t half = std::size_t{1} << i;
        for (std::size_t j = 0; j < half; ++j)
            elems[half + j] = elems[j] ^ static_cast<std::uint32_t>(basis.rows[i]);
    }
    return elems;
}

std::uint32_t subspace_intersection_dim(const SubspaceBasis& a, const SubspaceBasis& b) {
    if (a.n != b.n) throw std::invalid_argument("subspaces live in different ambient spaces");
    std::vector<std::uint64_t> pivot_rows(a.n, 0);
    std::uint32_t rank = 0;
    for (std::uint64_t v : a.rows) rank += basis_insert(pivot_rows, v);
    for (std::uint64_t v : b.rows) rank += basis_insert(pivot_rows, v);
    return a.k + b.k - rank;
}

mpz_class gaussian_binomial(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0;
    mpz_class num = 1, den = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
        mpz_class p2n = 1, p2k = 1, p2i = 1;
        p2n <<= n;
        p2k <<= k;
        p2i <<= i;
        num *= p2n - p2i;
        den *= p2k - p2i;
    }
    mpz_class out;
    mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

void for_each_subspace(std::uint32_t n, std::uint32_t k,
                       const std::function<void(const SubspaceBasis&)>& visit) {
    if (n < 1 || n > 63 || k > n) throw std::invalid_argument("invalid (n, k)");
    if (k == 0) {
        SubspaceBasis zero;
        zero.n = n;
        zero.k = 0;
        visit(zero);
        return;
    }

    // Pivot positions descending: p[0] > p[1] > ... > p[k-1]. Free entries of
    // row i sit at non-pivot positions below p[i].
    std::vector<std::uint32_t> pivots(k);
    for (std::uint32_t i = 0; i < k; ++i) pivots[i] = k - 1 - i;  // smallest combination

    SubspaceBasis basis;
    basis.n = n;
    basis.k = k;
    basis.rows.resize(k);

    auto emit_combination = [&]() {
        std::uint64_t pivot_mask = 0;
        for (std::uint32_t p : pivots) pivot_mask |= std::uint64_t{1} << p;
        // Free slots in a fixed order: rows top-down, positions descending.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> slots;  // (row, bit)
        for (std::uint32_t i = 0; i < k; ++i)
            for (int bit = int(pivots[i]) - 1; bit >= 0; --bit)
                if (!((pivot_mask >> bit) & 1u)) slots.emplace_back(i, std::uint32_t(bit));
        if (slots.size() > 40) throw std::invalid_argument("enumeration too large");

        const std::uint64_t total = std::uint64_t{1} << slots.size();
        for (std::uint64_t counter = 0; counter < total; ++counter) {
            for (std::uint32_t i = 0; i < k; ++i) basis.rows[i] = std::uint64_t{1} << pivots[i];
            for (std::size_t s = 0; s < slots.size(); ++s)
                if ((counter >> s) & 1u)
                    basis.rows[slots[s].first] |= std::uint64_t{1} << slots[s].second;
            visit(basis);
        }
    };

    // Odometer over k-combinations of {0..n-1}, kept descending.
    std::vector<std::uint32_t> asc(k);
    for (std::uint32_t i = 0; i < k; ++i) asc[i] = i;
    while (true) {
        for (std::uint32_t i = 0; i < k; ++i) pivots[i] = asc[k - 1 - i];
        emit_combination();
        int i = int(k) - 1;
        while (i >= 0 && asc[i] == n - k + i) --i;
        if (i < 0) break;
        ++asc[i];
        for (std::uint32_t j = i + 1; j < k; ++j) asc[j] = asc[j - 1] + 1;
    }
}

std::vector<SubspaceBasis> enumerate_subspaces(std::uint32_t n, std::uint32_t k,
                                               std::uint64_t budget) {
    if (gaussian_binomial(n, k) > mpz_class(static_cast<unsigned long>(
            std::min<std::uint64_t>(budget, ~0ULL >> 1))))
        throw std::invalid_argument("subspace count exceeds the enumeration budget; use sampling");
    std::vector<SubspaceBasis> out;
    for_each_subspace(n, k, [&](const SubspaceBasis& b) { out.push_back(b); });
    return out;
}

SubspaceCount count_subspaces(std::uint32_t n, std::uint32_t k) {
    if (k > n) throw std::invalid_argument("k must not exceed n");
    SubspaceCount out;
    out.exact = gaussian_binomial(n, k);
    out.lower_bound = 1;
    out.lower_bound <<= std::size_t{n} * k - std::size_t{k} * k;
    return out;
}

std::vector<mpz_class> intersection_profile(std::uint32_t n, std::uint32_t k,
                                            std::uint64_t budget) {
    const mpz_class count = gaussian_binomial(n, k);
    const mpz_class pairs = count * count;
    if (pairs > mpz_class(static_cast<unsigned long>(std::min<std::uint64_t>(budget, ~0ULL >> 1))))
        throw std::invalid_argument("pair count exceeds the enumeration budget");
    std::vector<SubspaceBasis> all;
    for_each_subspace(n, k, [&](const SubspaceBasis& b) { all.push_back(b); });
    std::vector<mpz_class> profile(k + 1, 0);
    for (const auto& v : all)
        for (const auto& w : all) ++profile[subspace_intersection_dim(v, w)];
    return profile;
}

mpz_class intersection_pairs_formula(std::uint32_t n, std::uint32_t k, std::uint32_t l) {
    if (l > k || k > n) return 0;
    mpz_class fixed_v = gaussian_binomial(k, l) * gaussian_binomial(n - k, k - l);
    mpz_class scale = 1;
    scale <<= std::size_t{k - l} * (k - l);
    return gaussian_binomial(n, k) * scale * fixed_v;
}

IntersectionPairCount count_intersection_pairs(std::uint32_t n, std::uint32_t k, std::uint32_t l,
                                               std::uint64_t budget) {
    if (l > k || k > n) throw std::invalid_argument("need l <= k <= n");
    IntersectionPairCount out;
    out.upper_bound = 1;
    out.upper_bound <<= 2 * std::size_t{n} * k - std::size_t{n} * l;
    const mpz_class count = gaussian_binomial(n, k);
    if (count * count <= mpz_class(static_cast<unsigned long>(std::min<std::uint64_t>(budget, ~0ULL >> 1)))) {
        out.exact = intersection_profile(n, k, budget)[l];
        out.enumerated = true;
    } else {
        out.exact = intersection_pairs_formula(n, k, l);
        out.enumerated = false;
    }
    return out;
}

std::uint32_t dense_threshold(std::uint32_t k, double eps) {
    return static_cast<std::uint32_t>(tail_threshold(eps, std::uint64_t{1} << k));
}

namespace {

std::uint32_t subspace_hits(const SubsetMask& a, const SubspaceBasis& basis) {
    std::uint32_t hits = 0;
    for (std::uint32_t e : subspace_elements(basis)) hits += a.test(e);
    return hits;
}

SubspaceBasis random_subspace(std::uint32_t n, std::uint32_t k, SplitMix64& rng) {
    for (int tries = 0; tries < 200; ++tries) {
        std::vector<std::uint64_t> vecs(k);
        for (std::uint32_t i = 0; i < k; ++i) vecs[i] = rng.next_below(std::uint64_t{1} << n);
        if (auto b = make_subspace(n, std::move(vecs))) return *b;
    }
    throw std::runtime_error("failed to draw a full-rank subspace");
}

}  // namespace

std::vector<DenseWitness> dense_subspace_search(const SubsetMask& a, std::uint32_t k, double eps,
                                                ScanMode mode, std::uint64_t count, Seed seed) {
    if (a.group().kind() != GroupKind::boolean_cube)
        throw std::invalid_argument("dense subspace search needs a boolean-cube group");
    const std::uint32_t n = a.group().dim();
    if (k > n) throw std::invalid_argument("k must not exceed the cube dimension");
    const std::uint32_t threshold = dense_threshold(k, eps);

    std::vector<DenseWitness> witnesses;
    if (mode == ScanMode::exhaustive) {
        if (gaussian_binomial(n, k) >
            mpz_class(static_cast<unsigned long>(std::min<std::uint64_t>(count, ~0ULL >> 1))))
            throw std::invalid_argument("enumeration exceeds the budget; use sampled mode");
        for_each_subspace(n, k, [&](const SubspaceBasis& b) {
            const std::uint32_t hits = subspace_hits(a, b);
            if (hits >= threshold) witnesses.push_back(DenseWitness{b, hits});
        });
        return witnesses;
    }

    SplitMix64 rng(seed);
    std::set<SubspaceBasis> seen;
    for (std::uint64_t i = 0; i < count; ++i) {
        SubspaceBasis b = random_subspace(n, k, rng);
        if (!seen.insert(b).second) continue;
        const std::uint32_t hits = subspace_hits(a, b);
        if (hits >= threshold) witnesses.push_back(DenseWitness{std::move(b), hits});
    }
    std::sort(witnesses.begin(), witnesses.end(),
              [](const DenseWitness& u, const DenseWitness& v) { return u.basis < v.basis; });
    return witnesses;
}

std::uint32_t second_moment_k(std::uint32_t n, int c) {
    if (n < 3) throw std::invalid_argument("need n >= 3");
    const double base = std::log2(double(n)) + std::log2(std::log2(double(n)));
    const long k = long(std::floor(base)) + c;
    if (k < 1) throw std::invalid_argument("derived k is not positive");
    return static_cast<std::uint32_t>(k);
}

bool second_moment_feasible(int c, double eps) {
    return std::pow(2.0, double(c) + 1.0) * rate_function(eps) < std::log(2.0);
}

SecondMomentReport second_moment_experiment(const SecondMomentConfig& config) {
    if (!(config.epsilon > 0.0) || config.epsilon >= 0.5)
        throw std::invalid_argument("epsilon must lie in (0, 1/2)");
    SecondMomentReport rep;
    rep.config = config;
    rep.k = second_moment_k(config.n, config.c);
    if (rep.k > config.n) throw std::invalid_argument("derived k exceeds n");
    rep.subspace_size = std::uint64_t{1} << rep.k;
    rep.threshold = dense_threshold(rep.k, config.epsilon);
    rep.feasible = second_moment_feasible(config.c, config.epsilon);
    rep.reference = (0.5 + config.epsilon) * (0.5 + config.epsilon);

    const Group cube = Group::boolean_cube(config.n);
    rep.witnesses_per_trial.resize(config.trials);
    for (std::uint32_t trial = 0; trial < config.trials; ++trial) {
        const SubsetMask a = random_subset_density_half(cube, substream(config.seed, trial));
        const Seed search_seed = substream(config.seed, 1'000'000 + trial);
        const auto witnesses =
            config.mode == ScanMode::exhaustive
                ? dense_subspace_search(a, rep.k, config.epsilon, ScanMode::exhaustive,
                                        config.budget, search_seed)
                : dense_subspace_search(a, rep.k, config.epsilon, ScanMode::sampled,
                                        config.samples_per_trial, search_seed);
        rep.witnesses_per_trial[trial] = static_cast<std::uint32_t>(witnesses.size());
        if (witnesses.empty()) ++rep.zero_trials;
    }

    const double trials = double(config.trials);
    rep.p_zero = double(rep.zero_trials) / trials;
    const double z = 1.96;
    const double z2 = z * z;
    const double center = (rep.p_zero + z2 / (2 * trials)) / (1 + z2 / trials);
    const double half = z *
                        std::sqrt(rep.p_zero * (1 - rep.p_zero) / trials +
                                  z2 / (4 * trials * trials)) /
                        (1 + z2 / trials);
    rep.wilson_low = std::max(0.0, center - half);
    rep.wilson_high = std::min(1.0, center + half);
    return rep;
}

SumsetResult sumset_search(const SubsetMask& a, std::uint32_t target_size,
                           std::uint32_t restarts, Seed seed) {
    const Group& g = a.group();
    if (g.kind() == GroupKind::table)
        throw std::invalid_argument("sumset search needs a cyclic or boolean-cube group");
    const std::uint32_t n = g.size();

    SumsetResult result{SubsetMask(g), false, target_size, std::max<std::uint32_t>(restarts, 1)};
    std::vector<std::uint32_t> order(n);
    std::vector<std::uint32_t> current;
    for (std::uint32_t r = 0; r < result.restarts; ++r) {
        for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
        SplitMix64 rng(substream(seed, r));
        detail::partial_shuffle(order, n, rng);
        current.clear();
        for (std::uint32_t e : order) {
            if (!a.test(g.op(e, e))) continue;
            bool ok = true;
            for (std::uint32_t x : current) {
                if (!a.test(g.op(e, x)) || !a.test(g.op(x, e))) {
                    ok = false;
                    break;
                }
            }
            if (ok) current.push_back(e);
        }
        if (current.size() > result.best.cardinality()) {
            SubsetMask best(g);
            for (std::uint32_t e : current) best.set(e);
            result.best = std::move(best);
        }
    }
    result.target_met = result.best.cardinality() >= target_size;
    return result;
}

CovarianceTerms covariance_terms(std::uint32_t k, double eps) {
    if (k < 1 || k > 40) throw std::invalid_argument("k out of range");
    if (!(eps > 0.0) || eps >= 0.5) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
    CovarianceTerms out;
    out.subspace_size = std::uint64_t{1} << k;
    const std::uint64_t h = tail_threshold(eps, out.subspace_size);
    if (h < 1) throw std::invalid_argument("threshold out of range");
    out.threshold = static_cast<std::uint32_t>(h);

    const std::uint64_t m = out.subspace_size - 1;  // Z ~ B(K-1, 1/2)
    const mpq_class tail_lo = binomial_tail_exact(m, h - 1);
    const mpq_class tail_hi = h > m ? mpq_class(0) : binomial_tail_exact(m, h);
    out.p_k = (tail_lo + tail_hi) / 2;
    const mpq_class half_diff = (tail_lo - tail_hi) / 2;
    out.c_k0 = half_diff * half_diff;
    out.degenerate = tail_hi == 0;
    if (out.p_k == 0) throw std::runtime_error("vanishing P_k; threshold beyond support");
    out.ratio = out.c_k0 / (out.p_k * out.p_k);
    const mpq_class reference = mpq_class(0.5 + eps) * mpq_class(0.5 + eps);
    out.ratio_below_reference = out.ratio <= reference;
    return out;
}

}  // namespace lab
