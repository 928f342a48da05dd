#pragma once

#include <cstdint>
#include <limits>

namespace rwre {

// SplitMix64 finalizer; also used as a keyed hash for site streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based 64-bit stream. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0,1) built from the top 53 bits; identical on every platform.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0,1).
    double uniform_open() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

/// Seed of replica `replica`, stream `stream` under a master seed. Replica seeds
/// do not depend on how many replicas exist.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica,
                                    std::uint64_t stream = 0) {
    return mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) + mix64(replica + 0x3c6ef372fe94f82bULL) +
                 stream * 0xa54ff53a5f1d36f1ULL);
}

}  // namespace rwre
