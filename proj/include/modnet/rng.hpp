#pragma once
#include <array>
#include <cstdint>
#include <limits>

namespace modnet {

// Identifies one reproducible random stream: a run-level root plus the
// replicate index within the run. Distinct replicate indices give
// statistically independent streams regardless of thread scheduling.
struct Seed {
    std::uint64_t root = 0;
    std::uint64_t replicate = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Mix extra context (experiment tag, dimension, ...) into a root seed so
// different sub-experiments of one run draw from disjoint streams.
inline std::uint64_t derive_root(std::uint64_t root, std::uint64_t tag) {
    std::uint64_t s = root ^ (0xBF58476D1CE4E5B9ULL * (tag + 1));
    detail::splitmix64(s);
    return detail::splitmix64(s);
}

// xoshiro256** seeded via SplitMix64 from (root, replicate).
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(Seed seed) {
        std::uint64_t s = seed.root;
        detail::splitmix64(s);
        s ^= 0x94D049BB133111EBULL * (seed.replicate + 1);
        for (auto& w : state_) w = detail::splitmix64(s);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5ULL, 7) * 9ULL;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace modnet
