#pragma once

#include <cstdint>
#include <optional>

#include "lab/group.hpp"

namespace lab {

enum class SearchMethod { exhaustive, greedy, anneal };

struct SearchConfig {
    SearchMethod method = SearchMethod::anneal;
    std::uint32_t min_size_x = 1;
    std::uint32_t min_size_y = 1;
    std::uint64_t budget = 1'000'000;  // pair evaluations (exhaustive) or proposals
    std::uint32_t restarts = 4;
    Seed seed;
    double t0 = 0.02;        // initial temperature
    double t_min = 1e-5;     // final temperature of the geometric schedule
    // Optional starting pair for greedy/anneal (e.g. to probe local optimality).
    std::optional<SubsetMask> start_x;
    std::optional<SubsetMask> start_y;
};

struct SearchOutcome {
    SubsetMask best_x;
    SubsetMask best_y;
    double best_deviation = 0.0;
    SearchMethod method = SearchMethod::anneal;
    std::uint64_t evaluations = 0;
};

// Maximizes epsilon_deviation(X, Y, A) over pairs with |X| >= min_size_x and
// |Y| >= min_size_y. Exhaustive mode visits every admissible pair (gated by
// budget); greedy applies best-improvement single-element moves until a local
// optimum; anneal runs restarted simulated annealing over the same move set.
SearchOutcome worst_pair_search(const SubsetMask& a, const SearchConfig& config);

// Number of admissible (X, Y) pairs for the exhaustive gate; saturates at
// uint64 max.
std::uint64_t exhaustive_pair_count(std::uint32_t n, std::uint32_t min_size_x,
                                    std::uint32_t min_size_y);

// Visits every admissible pair and returns the deviation maximizer. For a
// fixed X the pair count is linear in the indicator of Y, so the extremal Y
// of each cardinality is a sorted prefix/suffix of per-element counts; the
// scan is exact over all pairs without enumerating them one by one. No
// budget gate here; callers gate.
SearchOutcome exhaustive_worst_pair(const SubsetMask& a, std::uint32_t min_size_x,
                                    std::uint32_t min_size_y);

}  // namespace lab
