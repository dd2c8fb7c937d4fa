#pragma once

#include <cstdint>

namespace lqriter {

/// SplitMix64: the single PRNG used for every sampled quantity (probe
/// directions, test corpora, sweeps). 64-bit state, fixed increment,
/// identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform in [-1, 1).
    double symmetric_unit() { return uniform(-1.0, 1.0); }

    /// Derive an independent child stream, e.g. one per probe direction.
    Rng split() { return Rng(next_u64()); }

private:
    std::uint64_t state_;
};

} // namespace lqriter
