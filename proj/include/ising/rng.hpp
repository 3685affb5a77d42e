#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace ising
{

__extension__ using uint128_t = unsigned __int128;

/// SplitMix64 finalizer step. Used for seeding and for deriving per-job seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Mixes a base seed with a sequence of integer tags into a new 64-bit seed.
/// Order-sensitive; distinct tag tuples give unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept
{
    std::uint64_t state = base;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t t : tags)
    {
        state = h ^ (t + 0x632BE59BD9B4E019ULL);
        h = splitmix64(state);
    }
    return h;
}

/// Deterministic stream: xoshiro256** 1.0 (Blackman & Vigna), state filled by SplitMix64 from the seed.
///
/// The generator identity and the integer-to-variate conversions below are fixed; identical seeds give
/// identical sequences on every platform.
class RngStream
{
public:
    using result_type = std::uint64_t;

    explicit constexpr RngStream(std::uint64_t seed) noexcept
    {
        std::uint64_t sm = seed;
        for (auto& word : state_)
            word = splitmix64(sm);
    }

    /// Raw state constructor, for reproducing published test vectors.
    static constexpr RngStream from_state(const std::array<std::uint64_t, 4>& state) noexcept
    {
        RngStream rng(0);
        rng.state_ = state;
        return rng;
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return UINT64_MAX; }

    constexpr result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, bound) (Lemire's multiply-and-reject). bound must be > 0.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept
    {
        uint128_t m = static_cast<uint128_t>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound)
        {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold)
            {
                m = static_cast<uint128_t>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Fair coin.
    constexpr bool bit() noexcept { return ((*this)() >> 63) != 0; }

    friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace ising
