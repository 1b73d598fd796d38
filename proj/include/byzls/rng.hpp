#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace byzls {

/// Generator used for every stochastic choice in the library.
///
/// Streams are std::mt19937_64 instances seeded from (experiment seed,
/// purpose tag, index) through SplitMix64, so each consumer (partitioning,
/// initialization, worker i batching, bucketing at round t, ...) draws from
/// its own independent sequence.
using Rng = std::mt19937_64;

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

[[nodiscard]] inline Rng make_stream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
    const std::uint64_t mixed =
        splitmix64(splitmix64(seed) ^ fnv1a64(tag)) ^ splitmix64(index + 0x632BE59BD9B4E019ULL);
    std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
    return Rng(seq);
}

}  // namespace byzls
