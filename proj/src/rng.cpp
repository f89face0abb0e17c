#include "sdda/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdda {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

// splitmix64 finalizer (mix of a single word).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct SplitMix64 {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9E3779B97F4A7C15ULL;
        return mix64(s);
    }
};

} // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    SplitMix64 sm{seed};
    for (auto& w : s_) w = sm.next();
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double Rng::gaussian(double mean, double stddev) {
    if (stddev < 0.0) throw std::invalid_argument("Rng::gaussian: stddev must be >= 0");
    double z;
    if (has_spare_) {
        has_spare_ = false;
        z = spare_;
    } else {
        // 1 - uniform() lies in (0, 1], keeping the log argument nonzero.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        z = r * std::cos(a);
        spare_ = r * std::sin(a);
        has_spare_ = true;
    }
    return mean + stddev * z;
}

Rng Rng::substream(std::uint64_t id) const {
    return Rng(mix64(seed_ ^ mix64(id + 1)));
}

std::vector<double> sample_gaussian(Rng& rng, std::size_t n, double mean, double stddev) {
    if (stddev < 0.0) throw std::invalid_argument("sample_gaussian: stddev must be >= 0");
    std::vector<double> out(n);
    for (auto& x : out) x = rng.gaussian(mean, stddev);
    return out;
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.below(i)]);
}

} // namespace sdda
