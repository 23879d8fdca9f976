#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace relbc {

// Seed derivation (SplitMix64 finalizer). Sub-streams and per-trial seeds are
// derived as mix_seed(master, stream_index); the rule is part of the replay
// contract: the same master seed always yields the same family of streams.
inline constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + index * 0x9e3779b97f4a7c15ull + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic random stream. All samplers are implemented on top of the raw
// mt19937_64 output (which the standard pins bit-exactly), so sampled values
// are reproducible across platforms and standard library versions.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform double in [0, 1), 53 random bits
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    int bit() { return static_cast<int>(gen_() >> 63); }

    // Poisson sampler, Knuth multiplication method with mean chunking so the
    // running product never underflows for large means.
    std::uint32_t poisson(double mean) {
        std::uint32_t total = 0;
        while (mean > 16.0) {
            total += poisson_knuth(16.0);
            mean -= 16.0;
        }
        if (mean > 0.0) total += poisson_knuth(mean);
        return total;
    }

private:
    std::uint32_t poisson_knuth(double mean) {
        const double limit = std::exp(-mean);
        double prod = uniform();
        std::uint32_t n = 0;
        while (prod > limit) {
            ++n;
            prod *= uniform();
        }
        return n;
    }

    std::mt19937_64 gen_;
};

}  // namespace relbc
