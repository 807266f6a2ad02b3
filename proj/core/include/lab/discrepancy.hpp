#pragma once

#include <cstdint>
#include <vector>

#include "lab/group.hpp"

namespace lab {

// Representation function r(z) = #{(x,y) in X x Y : xy = z}. Exact integers.
struct RepCounts {
    Group group;
    std::vector<std::int64_t> counts;
    std::int64_t pair_total = 0;  // sum r(z) = |X||Y|
};

RepCounts rep_counts(const SubsetMask& x, const SubsetMask& y);

// #{(x,y) in X x Y : xy in A}, exact.
std::int64_t count_pairs(const SubsetMask& x, const SubsetMask& y, const SubsetMask& a);

// Same count through a cached representation function: sum_{z in A} r(z).
std::int64_t count_pairs(const RepCounts& rep, const SubsetMask& a);

// Convolution energy E = sum_z r(z)^2 = #{x1 y1 = x2 y2} by direct summation.
std::int64_t energy(const SubsetMask& x, const SubsetMask& y);

// |count/(|X||Y|) - 1/2|; the pair is eps-extracted by A iff this is <= eps.
double epsilon_deviation(const SubsetMask& x, const SubsetMask& y, const SubsetMask& a);

struct DiscrepancyReport {
    std::int64_t pair_count = 0;
    double normalized_inner = 0.0;      // (2*pair_count - |X||Y|) / (|X||Y|)
    double epsilon_extracted_at = 0.0;  // |pair fraction - 1/2|
    std::int64_t energy_count = 0;
};

DiscrepancyReport discrepancy_report(const SubsetMask& x, const SubsetMask& y,
                                     const SubsetMask& a);

}  // namespace lab
