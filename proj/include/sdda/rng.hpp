#pragma once

#include <cstdint>
#include <vector>

namespace sdda {

/// Deterministic pseudorandom generator: xoshiro256++ seeded through
/// splitmix64. Both algorithms are pinned so that any reimplementation
/// reproduces streams bit-exactly from the same seed:
///
///   splitmix64(s): s += 0x9E3779B97F4A7C15;
///                  z = s; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
///                  z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
///                  return z ^ (z >> 31);
///
///   xoshiro256++ state = four successive splitmix64 outputs;
///   next(): result = rotl(s0 + s3, 23) + s0, then the standard
///   xoshiro256 state transition (t = s1 << 17; s2 ^= s0; s3 ^= s1;
///   s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)).
///
/// uniform() maps the top 53 bits to [0, 1). Gaussians come from
/// Box-Muller over that uniform stream (pairs; the second value of a
/// pair is cached and served next).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    /// Uniform integer in [0, bound), rejection-sampled so the
    /// distribution is exact for any bound.
    std::uint64_t below(std::uint64_t bound);

    /// One N(mean, stddev^2) draw via Box-Muller. stddev must be >= 0.
    double gaussian(double mean, double stddev);

    /// Independent generator for substream `id` of the same seed.
    /// Derivation: seed' = mix(seed ^ mix(id + 1)) with the splitmix64
    /// finalizer as mix, so substreams of one seed never collide with
    /// each other or with the parent stream.
    Rng substream(std::uint64_t id) const;

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::vector<double> sample_gaussian(Rng& rng, std::size_t n, double mean, double stddev);

/// Fisher-Yates shuffle driven by rng.below (deterministic).
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng);

} // namespace sdda
