#pragma once

#include <cstdint>
#include <string_view>

namespace kmedoids {

__extension__ using uint128 = unsigned __int128;

/// SplitMix64 (Steele, Lea, Flood 2014). Platform independent: every draw,
/// bounded integer and real is derived from the 64-bit state with fixed
/// arithmetic, so identical seeds give identical streams on every compiler.
class Rng {
  public:
    static constexpr std::string_view algorithm_name = "splitmix64";

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        uint128 m = static_cast<uint128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<uint128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Child seed for an independent stream, e.g. one per restart.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    Rng mixer(seed ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
    mixer.next();
    return mixer.next();
}

}  // namespace kmedoids
