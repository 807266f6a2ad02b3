#pragma once

#include <cstdint>
#include <vector>

#include "lab/rng.hpp"

namespace lab {

// Erdos-Renyi G(N, 1/2) control model: each unordered pair {u,v}, u != v, is
// an edge independently with probability 1/2, sampled once per seed. No loops.
class ErGraph {
public:
    ErGraph(std::uint32_t n, Seed seed);

    std::uint32_t size() const { return n_; }
    bool edge(std::uint32_t u, std::uint32_t v) const {
        return (rows_[std::size_t{u} * stride_ + (v >> 6)] >> (v & 63)) & 1u;
    }

    // Ordered pairs (x,y), x != y, with {x,y} an edge.
    std::uint64_t count_ordered_pairs(const std::vector<std::uint32_t>& x,
                                      const std::vector<std::uint32_t>& y) const;

    // |e(X,Y)/(|X||Y| - |X cap Y|) - 1/2|. Pairs with x = y are inadmissible,
    // so they are removed from the denominator; errors when no admissible
    // pair exists.
    double deviation(const std::vector<std::uint32_t>& x,
                     const std::vector<std::uint32_t>& y) const;

private:
    std::uint32_t n_;
    std::size_t stride_;
    std::vector<std::uint64_t> rows_;
};

double er_bipartite_deviation(std::uint32_t n, Seed seed,
                              const std::vector<std::uint32_t>& x,
                              const std::vector<std::uint32_t>& y);

}  // namespace lab
