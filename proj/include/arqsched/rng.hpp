#pragma once

#include <cstdint>
#include <random>

namespace arqsched {

// Reproducible random streams. The mt19937_64 output sequence is fixed by the
// standard, so results are machine-independent as long as we avoid
// std::*_distribution (whose algorithms are implementation-defined) and use
// the explicit samplers below instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n >= 1. Rejection-free multiply-shift would
    // bias sub-2^-64; rejection keeps it exact and deterministic.
    int next_below(int n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<int>(x % bound);
    }

    bool next_bernoulli(double prob) { return next_unit() < prob; }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream for one Monte Carlo episode: derived from (seed, episode) so episodes
// are independent of evaluation order and safe to shard.
inline Rng episode_rng(std::uint64_t seed, std::uint64_t episode) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(episode + 0x51ed270b7a4fd1e5ULL)));
}

// Secondary stream (e.g. randomized policies) decorrelated from the channel
// stream of the same episode.
inline Rng episode_rng(std::uint64_t seed, std::uint64_t episode, std::uint64_t lane) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(episode + 0x51ed270b7a4fd1e5ULL) ^
                          splitmix64(lane + 0x63a3c29f1fe0c4a7ULL)));
}

} // namespace arqsched
