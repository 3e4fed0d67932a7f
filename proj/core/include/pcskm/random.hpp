#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pcskm {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Sub-seed for a tagged cell of an experiment grid: the master seed is mixed through
/// splitmix64, then each tag is xor-ed in and mixed again, left to right.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t s = splitmix64(master);
    for (auto t : tags) s = splitmix64(s ^ t);
    return s;
}

/// Uniform integer in [0, bound) by rejection; independent of the standard library's
/// distribution implementation so sampling stays bit-stable across toolchains.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x > limit);
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Standard normal draw (Box-Muller, cosine branch only).
double standard_normal(Rng& rng);

/// Exponential draw with the given rate (inverse CDF).
double exponential(Rng& rng, double rate);

}  // namespace pcskm
