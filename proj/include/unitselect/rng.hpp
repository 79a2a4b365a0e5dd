#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace unitselect {

/// Seeded uniform generator on top of std::mt19937_64. The engine and the
/// u64-to-double mapping are both pinned by the standard, so identical seeds
/// give bit-identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n); rejection keeps the draw unbiased.
    std::size_t index_below(std::size_t n) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return static_cast<std::size_t>(v % n);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace unitselect
