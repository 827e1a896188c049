#pragma once

#include <cstdint>
#include <random>

namespace ncpd {

// Counter-based stream derivation: every Monte Carlo trial draws from an
// engine seeded by (seed, phase, trial) so that results do not depend on
// execution order or the number of workers.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (0x9E3779B97F4A7C15ull + (b << 6) + (b >> 2)));
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t phase,
                                   std::uint64_t trial) {
    std::uint64_t key = mix_keys(mix_keys(splitmix64(seed), phase), trial);
    return std::mt19937_64(key);
}

}  // namespace ncpd
