#pragma once

#include <cstdint>
#include <random>

namespace ppm {

// Seeded random stream. The engine is std::mt19937_64 seeded with the 64-bit
// seed directly; its output sequence is fixed by the C++ standard. All
// variates are derived from raw engine output by the routines below (no
// std::*_distribution, whose algorithms are implementation-defined), so a
// seed reproduces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Poisson variate: multiplication method for mean < 10, otherwise
    /// Hormann's transformed rejection (PTRS).
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

/// Seed of replicate `index` derived from a base seed.
constexpr std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index) {
    return base + index;
}

}  // namespace ppm
