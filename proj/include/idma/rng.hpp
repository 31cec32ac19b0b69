#pragma once

#include <cmath>
#include <cstdint>

namespace idma {

/**
 * Counter-based deterministic RNG.
 *
 * Each stream is identified by a 64-bit key derived from (seed, stream id);
 * output i is a stateless avalanche of (key, i). Streams drawn for different
 * purposes or replications therefore never depend on evaluation order, which
 * keeps parallel replication runs bit-identical to serial ones.
 *
 * The core is the splitmix64 finalizer (passes BigCrush as a generator).
 */
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : key_(mix_key(seed, stream)) {}

    /// Independent child stream, e.g. one per replication or per restart.
    RngStream substream(std::uint64_t sub) const { return RngStream(key_, sub); }

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (counter_++ + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + uniform01() * (b - a); }

    /// Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) {
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller (one value per pair of uniforms).
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// +1 or -1 with equal probability.
    double rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

    bool bernoulli(double prob) { return uniform01() < prob; }

  private:
    static std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream ids, so draws for different purposes never collide.
namespace streams {
inline constexpr std::uint64_t kTruth = 1;       // fixed-across-replication draws
inline constexpr std::uint64_t kData = 2;        // per-replication noise and exposure
inline constexpr std::uint64_t kLambdaR = 3;     // quantile-rule Monte Carlo
inline constexpr std::uint64_t kCvFolds = 4;     // cross-validation fold shuffle
inline constexpr std::uint64_t kKmeans = 5;      // clustering restarts
inline constexpr std::uint64_t kSplit = 6;       // cross-fit sample split
}  // namespace streams

}  // namespace idma
