#include "lab/er_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace lab {

ErGraph::ErGraph(std::uint32_t n, Seed seed) : n_(n), stride_((std::size_t{n} + 63) / 64) {
    if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
    rows_.assign(stride_ * n, 0);
    SplitMix64 rng(seed);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v) {
            if (rng.next_bool()) {
                rows_[std::size_t{u} * stride_ + (v >> 6)] |= std::uint64_t{1} << (v & 63);
                rows_[std::size_t{v} * stride_ + (u >> 6)] |= std::uint64_t{1} << (u & 63);
            }
        }
    }
}

std::uint64_t ErGraph::count_ordered_pairs(const std::vector<std::uint32_t>& x,
                                           const std::vector<std::uint32_t>& y) const {
    std::vector<std::uint64_t> ymask(stride_, 0);
    for (std::uint32_t v : y) {
        if (v >= n_) throw std::invalid_argument("vertex index out of range");
        ymask[v >> 6] |= std::uint64_t{1} << (v & 63);
    }
    std::uint64_t count = 0;
    for (std::uint32_t u : x) {
        if (u >= n_) throw std::invalid_argument("vertex index out of range");
        const std::uint64_t* row = rows_.data() + std::size_t{u} * stride_;
        for (std::size_t w = 0; w < stride_; ++w) count += std::popcount(row[w] & ymask[w]);
    }
    return count;
}

double ErGraph::deviation(const std::vector<std::uint32_t>& x,
                          const std::vector<std::uint32_t>& y) const {
    if (x.empty() || y.empty()) throw std::invalid_argument("deviation needs nonempty X and Y");
    std::vector<std::uint32_t> xs = x, ys = y;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end() ||
        std::adjacent_find(ys.begin(), ys.end()) != ys.end())
        throw std::invalid_argument("vertex sets must not contain duplicates");
    std::vector<std::uint32_t> common;
    std::set_intersection(xs.begin(), xs.end(), ys.begin(), ys.end(),
                          std::back_inserter(common));
    const std::uint64_t admissible = std::uint64_t{xs.size()} * ys.size() - common.size();
    if (admissible == 0)
        throw std::invalid_argument("no admissible pairs: X x Y is all diagonal");
    const std::uint64_t edges = count_ordered_pairs(xs, ys);
    return std::abs(double(edges) / double(admissible) - 0.5);
}

double er_bipartite_deviation(std::uint32_t n, Seed seed,
                              const std::vector<std::uint32_t>& x,
                              const std::vector<std::uint32_t>& y) {
    return ErGraph(n, seed).deviation(x, y);
}

}  // namespace lab
