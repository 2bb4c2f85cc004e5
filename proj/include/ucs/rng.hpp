#pragma once

#include <cstdint>
#include <random>

namespace ucs {

/// SplitMix64 finalizer applied to `x + golden-ratio increment`, i.e. the
/// first output of a SplitMix64 generator seeded with `x`.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seeded random stream. Distributions are derived by hand from the raw
/// mt19937_64 output so that results are bit-identical across standard
/// libraries (std:: distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    /// Independent child stream keyed by a stream tag.
    Rng fork(std::uint64_t stream) const { return Rng(splitmix64(seed_ ^ splitmix64(stream + 1))); }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Exponential with mean 1.
    double exponential();

    /// Standard normal (Box-Muller, one value per call).
    double normal();

    /// Poisson with the given mean (Knuth below 30, rounded normal approximation above).
    std::uint64_t poisson(double mean);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace ucs
