#include "lab/subsample.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lab/discrepancy.hpp"

namespace lab {

namespace {

void require_valid_sizes(const SubsetMask& x, const SubsetMask& y, std::uint64_t s,
                         std::uint64_t t) {
    if (!x.group().same_as(y.group()))
        throw std::invalid_argument("masks live over different groups");
    if (s < 1 || s > x.cardinality() || t < 1 || t > y.cardinality())
        throw std::invalid_argument("subset sizes must satisfy 1 <= s <= |X|, 1 <= t <= |Y|");
}

// E(S,T) by direct counting with a reusable scratch histogram.
struct EnergyScratch {
    std::vector<std::int64_t> counts;
    std::vector<std::uint32_t> touched;

    explicit EnergyScratch(std::uint32_t n) : counts(n, 0) { touched.reserve(n); }

    std::int64_t pair_energy(const Group& g, const std::uint32_t* s_elems, std::size_t s_len,
                             const std::uint32_t* t_elems, std::size_t t_len) {
        for (std::size_t i = 0; i < s_len; ++i)
            for (std::size_t j = 0; j < t_len; ++j) {
                const std::uint32_t z = g.op(s_elems[i], t_elems[j]);
                if (counts[z]++ == 0) touched.push_back(z);
            }
        std::int64_t e = 0;
        for (std::uint32_t z : touched) {
            e += counts[z] * counts[z];
            counts[z] = 0;
        }
        touched.clear();
        return e;
    }
};

// Bit rows over the positive set of f, restricted to x's elements: one row
// per x in X, row[x] = {y : f(op(x,y)) = +1}. Pair counts against a sampled
// T reduce to word AND + popcount.
struct PositiveRows {
    std::size_t stride;
    std::vector<std::uint64_t> rows;
    std::vector<std::uint32_t> x_elems;

    PositiveRows(const SubsetMask& x, const SignedIndicator& f) {
        const Group& g = x.group();
        const std::uint32_t n = g.size();
        stride = (std::size_t{n} + 63) / 64;
        x_elems = x.elements();
        rows.assign(stride * x_elems.size(), 0);
        for (std::size_t i = 0; i < x_elems.size(); ++i)
            for (std::uint32_t y = 0; y < n; ++y)
                if (f.value(g.op(x_elems[i], y)) > 0)
                    rows[stride * i + (y >> 6)] |= std::uint64_t{1} << (y & 63);
    }

    std::int64_t count(const std::uint32_t* s_elems, std::size_t s_len,
                       const std::vector<std::uint64_t>& t_words,
                       const std::vector<std::uint32_t>& x_index) const {
        std::int64_t c = 0;
        for (std::size_t i = 0; i < s_len; ++i) {
            const std::uint64_t* row = rows.data() + stride * x_index[s_elems[i]];
            for (std::size_t w = 0; w < stride; ++w) c += std::popcount(row[w] & t_words[w]);
        }
        return c;
    }
};

}  // namespace

SubsampleParams choose_subsample_params(std::uint32_t group_size, double w_value,
                                        std::uint64_t x_size, std::uint64_t y_size) {
    if (group_size < 3) throw std::invalid_argument("group size must be at least 3");
    if (!(w_value > 0)) throw std::invalid_argument("w must be positive");
    if (x_size < 1 || x_size > y_size)
        throw std::invalid_argument("sizes must satisfy 1 <= |X| <= |Y|");

    SubsampleParams p;
    p.group_size = group_size;
    p.w_value = w_value;
    p.epsilon = std::pow(1e5 / w_value, 1.0 / 6.0);
    const double log_n = std::log(double(group_size));
    const double eps4 = p.epsilon * p.epsilon * p.epsilon * p.epsilon;
    p.s_raw = 2000.0 * log_n / eps4;
    p.t_raw = double(y_size) * p.epsilon * p.epsilon / (50.0 * log_n);

    double s_ceil = std::ceil(p.s_raw);
    double t_ceil = std::ceil(p.t_raw);
    p.s_clamped = s_ceil < 1 || s_ceil > double(x_size);
    p.t_clamped = t_ceil < 1 || t_ceil > double(y_size);
    p.s = static_cast<std::uint64_t>(std::min(std::max(s_ceil, 1.0), double(x_size)));
    p.t = static_cast<std::uint64_t>(std::min(std::max(t_ceil, 1.0), double(y_size)));
    return p;
}

mpq_class exact_expected_energy(const SubsetMask& x, const SubsetMask& y, std::uint64_t s,
                                std::uint64_t t) {
    require_valid_sizes(x, y, s, t);
    const mpz_class n = x.group().size();
    const mpz_class n3 = n * n * n;
    mpq_class result(mpz_class(s) * t, n3);
    result.canonicalize();
    if (s >= 2 && t >= 2) {
        const std::uint64_t xc = x.cardinality();
        const std::uint64_t yc = y.cardinality();
        const mpz_class off_solutions = mpz_class(energy(x, y)) - mpz_class(xc) * yc;
        mpz_class num = off_solutions * s * (s - 1) * t * (t - 1);
        mpz_class den = n3 * xc * (xc - 1) * yc * (yc - 1);
        mpq_class off(num, den);
        off.canonicalize();
        result += off;
    }
    return result;
}

mpq_class expected_energy_bound(const SubsetMask& x, const SubsetMask& y, std::uint64_t s,
                                std::uint64_t t) {
    require_valid_sizes(x, y, s, t);
    const mpz_class n = x.group().size();
    const mpz_class n3 = n * n * n;
    const std::uint64_t xc = x.cardinality();
    const std::uint64_t yc = y.cardinality();
    mpq_class first(mpz_class(s) * t, n3);
    first.canonicalize();
    mpz_class num = mpz_class(energy(x, y)) * s * s * t * t;
    mpz_class den = n3 * xc * xc * yc * yc;
    mpq_class second(num, den);
    second.canonicalize();
    return first + second;
}

MonteCarloCheck mc_expected_energy(const SubsetMask& x, const SubsetMask& y, std::uint64_t s,
                                   std::uint64_t t, std::uint64_t trials, Seed seed) {
    require_valid_sizes(x, y, s, t);
    if (trials < 2) throw std::invalid_argument("need at least 2 trials");
    const Group& g = x.group();
    const double n3 = std::pow(double(g.size()), 3.0);

    const std::vector<std::uint32_t> x_elems = x.elements();
    const std::vector<std::uint32_t> y_elems = y.elements();
    std::vector<std::uint32_t> s_buf, t_buf;
    EnergyScratch scratch(g.size());

    double mean = 0, m2 = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        SplitMix64 rng_s(substream(seed, 2 * i));
        SplitMix64 rng_t(substream(seed, 2 * i + 1));
        s_buf = x_elems;
        t_buf = y_elems;
        detail::partial_shuffle(s_buf, static_cast<std::uint32_t>(s), rng_s);
        detail::partial_shuffle(t_buf, static_cast<std::uint32_t>(t), rng_t);
        const double v = double(scratch.pair_energy(g, s_buf.data(), s, t_buf.data(), t)) / n3;
        const double delta = v - mean;
        mean += delta / double(i + 1);
        m2 += delta * (v - mean);
    }

    MonteCarloCheck out;
    out.has_exact = true;
    out.exact_expectation = exact_expected_energy(x, y, s, t).get_d();
    out.bound = expected_energy_bound(x, y, s, t).get_d();
    out.mc_mean = mean;
    out.mc_stderr = std::sqrt(m2 / (double(trials) * double(trials - 1)));
    out.trials = trials;
    out.exact_below_bound = exact_expected_energy(x, y, s, t) <= expected_energy_bound(x, y, s, t);
    out.check_passed = std::abs(out.mc_mean - out.exact_expectation) <= 4.0 * out.mc_stderr;
    return out;
}

double closeness_bound(std::uint64_t y_size, std::uint64_t s, std::uint64_t t) {
    return 2.0 * std::sqrt(double(y_size) / (double(s) * double(t)));
}

namespace {

// |2 (c1 P2 - c2 P1)| / (P1 P2) with c1 over (S,T), c2 over (X,Y).
double gap_value(std::int64_t c1, std::int64_t p1, std::int64_t c2, std::int64_t p2) {
    const double num = 2.0 * std::abs(double(c1) * double(p2) - double(c2) * double(p1));
    return num / (double(p1) * double(p2));
}

}  // namespace

MonteCarloCheck mc_closeness(const SubsetMask& x, const SubsetMask& y, const SignedIndicator& f,
                             std::uint64_t s, std::uint64_t t, std::uint64_t trials, Seed seed) {
    require_valid_sizes(x, y, s, t);
    if (f.values.size() != x.universe_size())
        throw std::invalid_argument("indicator length does not match group size");
    if (trials < 2) throw std::invalid_argument("need at least 2 trials");
    const Group& g = x.group();

    const std::vector<std::uint32_t> x_elems = x.elements();
    const std::vector<std::uint32_t> y_elems = y.elements();
    const PositiveRows rows(x, f);
    std::vector<std::uint32_t> x_index(g.size(), 0);
    for (std::size_t i = 0; i < x_elems.size(); ++i) x_index[x_elems[i]] = std::uint32_t(i);

    // Reference inner product over (X, Y).
    std::int64_t c2 = 0;
    {
        std::vector<std::uint64_t> y_words((std::size_t{g.size()} + 63) / 64, 0);
        for (std::uint32_t e : y_elems) y_words[e >> 6] |= std::uint64_t{1} << (e & 63);
        c2 = rows.count(x_elems.data(), x_elems.size(), y_words, x_index);
    }
    const std::int64_t p1 = std::int64_t(s) * std::int64_t(t);
    const std::int64_t p2 = std::int64_t(x.cardinality()) * std::int64_t(y.cardinality());

    std::vector<std::uint32_t> s_buf, t_buf;
    std::vector<std::uint64_t> t_words((std::size_t{g.size()} + 63) / 64, 0);

    double mean = 0, m2 = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        SplitMix64 rng_s(substream(seed, 2 * i));
        SplitMix64 rng_t(substream(seed, 2 * i + 1));
        s_buf = x_elems;
        t_buf = y_elems;
        detail::partial_shuffle(s_buf, static_cast<std::uint32_t>(s), rng_s);
        detail::partial_shuffle(t_buf, static_cast<std::uint32_t>(t), rng_t);
        std::fill(t_words.begin(), t_words.end(), 0);
        for (std::uint64_t j = 0; j < t; ++j)
            t_words[t_buf[j] >> 6] |= std::uint64_t{1} << (t_buf[j] & 63);
        const std::int64_t c1 = rows.count(s_buf.data(), s, t_words, x_index);
        const double v = gap_value(c1, p1, c2, p2);
        const double delta = v - mean;
        mean += delta / double(i + 1);
        m2 += delta * (v - mean);
    }

    MonteCarloCheck out;
    out.has_exact = false;
    out.bound = closeness_bound(y.cardinality(), s, t);
    out.mc_mean = mean;
    out.mc_stderr = std::sqrt(m2 / (double(trials) * double(trials - 1)));
    out.trials = trials;
    out.check_passed = out.mc_mean <= out.bound + 4.0 * out.mc_stderr;
    return out;
}

namespace {

std::int64_t positive_pair_count(const SubsetMask& u, const SubsetMask& v,
                                 const SignedIndicator& f) {
    const Group& g = u.group();
    std::int64_t c = 0;
    for (std::uint32_t a : u.elements())
        for (std::uint32_t b : v.elements())
            c += f.value(g.op(a, b)) > 0;
    return c;
}

}  // namespace

double closeness_gap(const SubsetMask& x, const SubsetMask& y, const SignedIndicator& f,
                     const SubsetMask& s_subset, const SubsetMask& t_subset) {
    const std::int64_t c1 = positive_pair_count(s_subset, t_subset, f);
    const std::int64_t c2 = positive_pair_count(x, y, f);
    const std::int64_t p1 = std::int64_t(s_subset.cardinality()) * t_subset.cardinality();
    const std::int64_t p2 = std::int64_t(x.cardinality()) * y.cardinality();
    return gap_value(c1, p1, c2, p2);
}

bool closeness_condition_holds(const SubsetMask& x, const SubsetMask& y,
                               const SignedIndicator& f, const SubsetMask& s_subset,
                               const SubsetMask& t_subset) {
    const std::int64_t c1 = positive_pair_count(s_subset, t_subset, f);
    const std::int64_t c2 = positive_pair_count(x, y, f);
    const mpz_class p1 = mpz_class(s_subset.cardinality()) * t_subset.cardinality();
    const mpz_class p2 = mpz_class(x.cardinality()) * y.cardinality();
    // |2 (c1 p2 - c2 p1)/(p1 p2)| <= 6 sqrt(|Y|/(s t))
    //   <=>  4 (c1 p2 - c2 p1)^2 <= 36 |Y| p1 p2^2
    const mpz_class diff = mpz_class(c1) * p2 - mpz_class(c2) * p1;
    return 4 * diff * diff <= 36 * mpz_class(y.cardinality()) * p1 * p2 * p2;
}

bool energy_condition_holds(const SubsetMask& x, const SubsetMask& y,
                            const SubsetMask& s_subset, const SubsetMask& t_subset) {
    const mpz_class e_st = energy(s_subset, t_subset);
    const mpz_class e_xy = energy(x, y);
    const mpz_class xy2 = mpz_class(x.cardinality()) * x.cardinality() *
                          mpz_class(y.cardinality()) * y.cardinality();
    const mpz_class st = mpz_class(s_subset.cardinality()) * t_subset.cardinality();
    // E(S,T)/N^3 <= 3 st/N^3 + 3 s^2 t^2 E(X,Y)/(|X|^2|Y|^2 N^3), cleared of
    // denominators.
    return e_st * xy2 <= 3 * st * xy2 + 3 * st * st * e_xy;
}

WitnessSearchResult find_witness_pair(const SubsetMask& x, const SubsetMask& y,
                                      const SignedIndicator& f, const SubsampleParams& params,
                                      std::uint32_t max_attempts, Seed seed) {
    if (x.cardinality() > y.cardinality())
        throw std::invalid_argument("needs |X| <= |Y|");
    require_valid_sizes(x, y, params.s, params.t);
    const Group& g = x.group();
    const std::uint64_t s = params.s;
    const std::uint64_t t = params.t;

    WitnessSearchResult result;
    for (std::uint32_t attempt = 1; attempt <= max_attempts; ++attempt) {
        const SubsetMask s_subset =
            random_fixed_size_subset(x, static_cast<std::uint32_t>(s), substream(seed, 2 * attempt));
        const SubsetMask t_subset = random_fixed_size_subset(
            y, static_cast<std::uint32_t>(t), substream(seed, 2 * attempt + 1));
        result.attempts = attempt;

        if (!closeness_condition_holds(x, y, f, s_subset, t_subset)) continue;
        if (!energy_condition_holds(x, y, s_subset, t_subset)) continue;

        WitnessPair w{s_subset, t_subset, attempt, 0, 0, false, 0, 0};
        const double e_st = double(energy(s_subset, t_subset));
        w.energy_ratio = double(s) * double(s) * double(t) * double(t) / e_st;
        w.required_ratio = 6.0 * double(t) * std::log(double(g.size())) /
                           (params.epsilon * params.epsilon);
        w.meets_ratio_threshold = w.energy_ratio >= w.required_ratio;
        w.closeness_gap = closeness_gap(x, y, f, s_subset, t_subset);
        w.closeness_limit = 3.0 * closeness_bound(y.cardinality(), s, t);
        result.witness = std::move(w);
        result.acceptance_rate = 1.0 / double(attempt);
        return result;
    }
    result.attempts = max_attempts;
    result.acceptance_rate = 0.0;
    return result;
}

}  // namespace lab
