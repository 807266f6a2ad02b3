#pragma once

#include <cstdint>
#include <optional>

#include <gmpxx.h>

#include "lab/group.hpp"

namespace lab {

// Subset sizes s and t for the two-stage subsampling, derived from the group
// size and the slack parameter w: eps = (1e5/w)^{1/6},
// s = ceil(2000 log N / eps^4), t = ceil(|Y| eps^2 / (50 log N)). Both are
// clamped into [1, |X|] and [1, |Y|]; clamping is flagged because the
// formulas assume sizes large enough that no clamp occurs.
struct SubsampleParams {
    std::uint32_t group_size = 0;
    double w_value = 0;
    double epsilon = 0;
    std::uint64_t s = 0;
    std::uint64_t t = 0;
    bool s_clamped = false;
    bool t_clamped = false;
    double s_raw = 0;  // before ceil/clamp
    double t_raw = 0;
};

SubsampleParams choose_subsample_params(std::uint32_t group_size, double w_value,
                                        std::uint64_t x_size, std::uint64_t y_size);

// Exact E ||1_S * 1_T||_2^2 over uniform fixed-size subsets S of X and T of
// Y, as a big rational:
//   st/N^3 + (E(X,Y) - |X||Y|) * [s(s-1)t(t-1)] / [N^3 |X|(|X|-1)|Y|(|Y|-1)].
// The off-diagonal solution count is exactly E(X,Y) - |X||Y| because
// x1 y1 = x2 y2 with x1 = x2 forces y1 = y2 in a group.
mpq_class exact_expected_energy(const SubsetMask& x, const SubsetMask& y, std::uint64_t s,
                                std::uint64_t t);

// Companion upper bound st/N^3 + s^2 t^2 E(X,Y) / (|X|^2 |Y|^2 N^3).
mpq_class expected_energy_bound(const SubsetMask& x, const SubsetMask& y, std::uint64_t s,
                                std::uint64_t t);

struct MonteCarloCheck {
    bool has_exact = false;        // closed form available (energy case)
    double exact_expectation = 0;
    double bound = 0;              // inequality right-hand side for the mean
    double mc_mean = 0;
    double mc_stderr = 0;
    std::uint64_t trials = 0;
    bool exact_below_bound = true; // exact <= bound, when has_exact
    // Energy: |mean - exact| <= 4 stderr. Closeness: mean <= bound + 4 stderr.
    bool check_passed = true;
};

MonteCarloCheck mc_expected_energy(const SubsetMask& x, const SubsetMask& y, std::uint64_t s,
                                   std::uint64_t t, std::uint64_t trials, Seed seed);

// 2 sqrt(|Y| / (s t)), the mean bound for the inner-product gap.
double closeness_bound(std::uint64_t y_size, std::uint64_t s, std::uint64_t t);

// Monte Carlo mean of |<N^2 1_S*1_T/(st), f> - <N^2 1_X*1_Y/(|X||Y|), f>|,
// each inner product an exact integer combination of pair counts.
MonteCarloCheck mc_closeness(const SubsetMask& x, const SubsetMask& y, const SignedIndicator& f,
                             std::uint64_t s, std::uint64_t t, std::uint64_t trials, Seed seed);

// Exact inner-product gap for one concrete (S, T).
double closeness_gap(const SubsetMask& x, const SubsetMask& y, const SignedIndicator& f,
                     const SubsetMask& s_subset, const SubsetMask& t_subset);

// The two acceptance conditions, decided in exact integer arithmetic.
bool closeness_condition_holds(const SubsetMask& x, const SubsetMask& y,
                               const SignedIndicator& f, const SubsetMask& s_subset,
                               const SubsetMask& t_subset);
bool energy_condition_holds(const SubsetMask& x, const SubsetMask& y,
                            const SubsetMask& s_subset, const SubsetMask& t_subset);

struct WitnessPair {
    SubsetMask s_subset;
    SubsetMask t_subset;
    std::uint32_t attempts = 0;
    double energy_ratio = 0;      // s^2 t^2 / E(S,T) = s^2 t^2 / (N^3 ||1_S*1_T||^2)
    double required_ratio = 0;    // 6 t log N / eps^2
    bool meets_ratio_threshold = false;
    double closeness_gap = 0;
    double closeness_limit = 0;   // 6 sqrt(|Y|/(st))
};

struct WitnessSearchResult {
    std::optional<WitnessPair> witness;
    std::uint32_t attempts = 0;
    double acceptance_rate = 0;  // accepted / attempts over this search
};

// Rejection sampler: draws (S, T) until both the closeness condition
// |gap| <= 6 sqrt(|Y|/(st)) and the energy condition
// E(S,T) <= 3 s t + 3 s^2 t^2 E(X,Y) / (|X|^2 |Y|^2) hold. Markov's
// inequality puts the per-attempt success probability at 1/3 or better.
WitnessSearchResult find_witness_pair(const SubsetMask& x, const SubsetMask& y,
                                      const SignedIndicator& f, const SubsampleParams& params,
                                      std::uint32_t max_attempts, Seed seed);

}  // namespace lab
