#pragma once

#include <cstdint>

namespace lab {

// Every random draw in a run is a pure function of (master, stream) and the
// index of the trial that owns it, so parallel and serial executions of the
// same configuration produce identical results.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

// SplitMix64 finalizer (Vigna / Java SplittableRandom).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Child seed for trial `index` of a battery.
inline Seed substream(Seed seed, std::uint64_t index) {
    return Seed{seed.master, mix64(seed.stream ^ mix64(index ^ 0xd1b54a32d192ed03ULL))};
}

// Counter-based SplitMix64 stream. Cheap to construct per trial and fully
// portable: identical output on every platform and toolchain.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    explicit SplitMix64(Seed seed) : state_(mix64(seed.master) ^ mix64(~seed.stream)) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on [0, n) by rejection; n must be positive.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    bool next_bool() { return (next() >> 63) != 0; }

    bool bernoulli(double q) {
        if (q <= 0.0) return false;
        if (q >= 1.0) return true;
        return next_unit() < q;
    }

private:
    std::uint64_t state_;
};

}  // namespace lab
