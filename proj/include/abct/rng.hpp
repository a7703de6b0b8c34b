#pragma once

#include <cstdint>

namespace abct {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer; the round function of the keyed permutation and the
/// mixer behind every seeded draw in the library.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// SplitMix64 stream. Bounded draws use rejection so results do not depend on
/// the standard library's distribution implementation.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    /// Uniform in [0, bound); bound > 0.
    constexpr std::uint64_t uniform(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace abct
