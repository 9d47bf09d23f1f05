#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace irsbf {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream for one Monte Carlo trial. The stream depends only on
/// (master_seed, sweep_value, trial_index), never on scheduling order.
inline Rng trial_stream(std::uint64_t master_seed, double sweep_value, std::uint64_t trial_index) {
    // +0.0 and -0.0 should map to the same stream
    const double v = sweep_value == 0.0 ? 0.0 : sweep_value;
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
    h = mix64(h ^ trial_index);
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return Rng(seq);
}

}  // namespace irsbf
