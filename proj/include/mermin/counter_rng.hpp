#pragma once

#include <cstdint>

namespace mermin {

/// Counter-based view of the SplitMix64 sequence: draw n of the stream keyed
/// by `seed` is mix(seed + (n + 1) * gamma), so any position can be evaluated
/// directly without advancing state. Trial i owns draws
/// [i * kDrawsPerTrial, (i + 1) * kDrawsPerTrial).
///
/// See https://prng.di.unimi.it for the mixing function.
class CounterRng
{
  public:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

    constexpr explicit CounterRng(std::uint64_t seed) noexcept : key_(mix(seed)) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t draw(std::uint64_t counter) const noexcept
    {
        return mix(key_ + (counter + 1) * kGamma);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    static constexpr double to_unit(std::uint64_t bits) noexcept
    {
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) by multiply-high; bias is below n / 2^64.
    static constexpr std::uint32_t to_below(std::uint64_t bits, std::uint32_t n) noexcept
    {
        return static_cast<std::uint32_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
    }

  private:
    std::uint64_t key_;
};

}  // namespace mermin
