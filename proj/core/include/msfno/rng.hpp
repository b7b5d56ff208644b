#pragma once

#include <cstdint>

namespace msfno {

/// SplitMix64: tiny, seedable, platform-independent 64-bit generator.
/// All dataset and parameter randomness goes through this so that runs
/// reproduce bit-for-bit from their seeds.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::uint64_t state_;
};

/// Stream-derived seed: independent child seed for sample/branch `index`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    SplitMix64 g(base ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return g.next();
}

}  // namespace msfno
