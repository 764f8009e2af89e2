#pragma once

#include <cmath>
#include <cstdint>

namespace graybatt {

// Counter-splittable deterministic RNG (splitmix64 core).
//
// Streams are derived from (seed, stream, substream) by hashing, so a parallel
// schedule that hands each worker its own derived stream produces results that
// do not depend on thread interleaving.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
        std::uint64_t h = mix(seed ^ 0x8f1bbcdcbfa53e0bULL);
        h = mix(h ^ (stream * 0x9e3779b97f4a7c15ULL));
        h = mix(h ^ (substream * 0xd1b54a32d192ed03ULL));
        return Rng(h);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        // avoid log(0)
        u1 = 1.0 - u1;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace graybatt
