#pragma once

// Seeded random streams. Variates are derived from raw engine output with
// explicit transforms so traces do not depend on the standard library's
// distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace vardislab {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Seed for replication `replication` of an experiment with `master` seed.
[[nodiscard]] constexpr std::uint64_t replication_seed(std::uint64_t master,
                                                       std::uint64_t replication) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(replication + 0x5EED));
}

/// Seed for the named stream of one node inside a replication.
[[nodiscard]] constexpr std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t node,
                                                  std::string_view stream) noexcept {
    return splitmix64(splitmix64(run_seed ^ splitmix64(node)) ^ fnv1a(stream));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    double exponential(double rate) noexcept { return -std::log1p(-uniform01()) / rate; }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    std::uint64_t next_u64() noexcept { return engine_(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace vardislab
