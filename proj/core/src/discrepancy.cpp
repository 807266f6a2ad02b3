#include "lab/discrepancy.hpp"

#include <cmath>
#include <stdexcept>

namespace lab {

namespace {

void require_same_group(const SubsetMask& a, const SubsetMask& b) {
    if (!a.group().same_as(b.group()))
        throw std::invalid_argument("masks live over different groups");
}

}  // namespace

RepCounts rep_counts(const SubsetMask& x, const SubsetMask& y) {
    require_same_group(x, y);
    const Group& g = x.group();
    RepCounts rep{g, std::vector<std::int64_t>(g.size(), 0), 0};
    const auto xs = x.elements();
    const auto ys = y.elements();
    for (std::uint32_t xe : xs)
        for (std::uint32_t ye : ys)
            ++rep.counts[g.op(xe, ye)];
    rep.pair_total = std::int64_t{x.cardinality()} * y.cardinality();
    return rep;
}

std::int64_t count_pairs(const SubsetMask& x, const SubsetMask& y, const SubsetMask& a) {
    require_same_group(x, y);
    require_same_group(x, a);
    const Group& g = x.group();
    const auto xs = x.elements();
    const auto ys = y.elements();
    std::int64_t count = 0;
    for (std::uint32_t xe : xs)
        for (std::uint32_t ye : ys)
            count += a.test(g.op(xe, ye));
    return count;
}

std::int64_t count_pairs(const RepCounts& rep, const SubsetMask& a) {
    if (!rep.group.same_as(a.group()))
        throw std::invalid_argument("rep counts and mask live over different groups");
    std::int64_t count = 0;
    for (std::uint32_t z : a.elements()) count += rep.counts[z];
    return count;
}

std::int64_t energy(const SubsetMask& x, const SubsetMask& y) {
    RepCounts rep = rep_counts(x, y);
    std::int64_t e = 0;
    for (std::int64_t r : rep.counts) e += r * r;
    return e;
}

double epsilon_deviation(const SubsetMask& x, const SubsetMask& y, const SubsetMask& a) {
    if (x.cardinality() == 0 || y.cardinality() == 0)
        throw std::invalid_argument("epsilon_deviation needs nonempty X and Y");
    const double total = double(x.cardinality()) * double(y.cardinality());
    return std::abs(double(count_pairs(x, y, a)) / total - 0.5);
}

DiscrepancyReport discrepancy_report(const SubsetMask& x, const SubsetMask& y,
                                     const SubsetMask& a) {
    if (x.cardinality() == 0 || y.cardinality() == 0)
        throw std::invalid_argument("discrepancy_report needs nonempty X and Y");
    RepCounts rep = rep_counts(x, y);
    DiscrepancyReport out;
    out.pair_count = count_pairs(rep, a);
    const double total = double(rep.pair_total);
    out.normalized_inner = (2.0 * double(out.pair_count) - total) / total;
    out.epsilon_extracted_at = std::abs(double(out.pair_count) / total - 0.5);
    std::int64_t e = 0;
    for (std::int64_t r : rep.counts) e += r * r;
    out.energy_count = e;
    return out;
}

}  // namespace lab
