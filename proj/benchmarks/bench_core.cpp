#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "lab/discrepancy.hpp"
#include "lab/er_model.hpp"
#include "lab/fourier.hpp"
#include "lab/search.hpp"
#include "lab/subspace.hpp"
#include "lab/tail_bounds.hpp"

namespace {

lab::SubsetMask half_mask(const lab::Group& g, std::uint64_t stream) {
    return lab::random_subset_density_half(g, lab::Seed{0xBE7C4, stream});
}

void BM_FastEnergyCyclic(benchmark::State& state) {
    const lab::Group g = lab::Group::cyclic(std::uint32_t(state.range(0)));
    const auto x = half_mask(g, 1), y = half_mask(g, 2);
    for (auto _ : state) benchmark::DoNotOptimize(lab::fast_energy(x, y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FastEnergyCyclic)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_FastEnergyCube(benchmark::State& state) {
    const lab::Group g = lab::Group::boolean_cube(std::uint32_t(state.range(0)));
    const auto x = half_mask(g, 1), y = half_mask(g, 2);
    for (auto _ : state) benchmark::DoNotOptimize(lab::fast_energy(x, y));
}
BENCHMARK(BM_FastEnergyCube)->DenseRange(6, 14, 2);

void BM_DirectEnergy(benchmark::State& state) {
    const lab::Group g = lab::Group::cyclic(std::uint32_t(state.range(0)));
    const auto x = half_mask(g, 1), y = half_mask(g, 2);
    for (auto _ : state) benchmark::DoNotOptimize(lab::energy(x, y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DirectEnergy)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

void BM_DftDirect(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    std::vector<std::complex<double>> f(n);
    lab::SplitMix64 rng(7);
    for (auto& v : f) v = rng.next_unit();
    for (auto _ : state) benchmark::DoNotOptimize(lab::detail::dft_direct(f, +1));
}
BENCHMARK(BM_DftDirect)->Arg(101)->Arg(997)->Arg(4096);

void BM_FftAny(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    std::vector<std::complex<double>> f(n);
    lab::SplitMix64 rng(7);
    for (auto& v : f) v = rng.next_unit();
    for (auto _ : state) benchmark::DoNotOptimize(lab::detail::fft_any(f, +1));
}
BENCHMARK(BM_FftAny)->Arg(101)->Arg(997)->Arg(4096)->Arg(65536);

void BM_AnnealSearch(benchmark::State& state) {
    const lab::Group g = lab::Group::cyclic(std::uint32_t(state.range(0)));
    const auto a = half_mask(g, 3);
    for (auto _ : state) {
        lab::SearchConfig config;
        config.method = lab::SearchMethod::anneal;
        config.min_size_x = config.min_size_y = 16;
        config.budget = 20000;
        config.restarts = 1;
        config.seed = lab::Seed{1, 1};
        benchmark::DoNotOptimize(lab::worst_pair_search(a, config));
    }
}
BENCHMARK(BM_AnnealSearch)->Arg(256)->Arg(1024)->Arg(4096);

void BM_SubspaceEnumeration(benchmark::State& state) {
    const auto n = std::uint32_t(state.range(0));
    const auto k = std::uint32_t(state.range(1));
    for (auto _ : state) {
        std::uint64_t count = 0;
        lab::for_each_subspace(n, k, [&](const lab::SubspaceBasis&) { ++count; });
        benchmark::DoNotOptimize(count);
    }
}
BENCHMARK(BM_SubspaceEnumeration)->Args({6, 3})->Args({8, 4});

void BM_BinomialTailRow(benchmark::State& state) {
    const auto n = std::uint64_t(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(lab::binomial_tail_exact(n, lab::tail_threshold(0.1, n)));
}
BENCHMARK(BM_BinomialTailRow)->Arg(500)->Arg(2000)->Arg(5000);

void BM_ErGraphSample(benchmark::State& state) {
    const auto n = std::uint32_t(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const lab::ErGraph graph(n, lab::Seed{9, stream++});
        benchmark::DoNotOptimize(graph.edge(0, 1));
    }
}
BENCHMARK(BM_ErGraphSample)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
