#pragma once

// Counter-based deterministic RNG. Every sample is a pure function of
// (seed, stream, counter), so data-parallel consumers get bit-identical
// results for any thread count or traversal order.
//
// The generator is the splitmix64 output function evaluated at
// key + counter * gamma, i.e. splitmix64 with O(1) jump-ahead.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bracketforge {

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream),
          key_(detail::mix64(seed + detail::kGolden) ^
               detail::mix64(stream * 0xDA942042E4DD58B5ull + 0x8BB84B93962EACC9ull)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // Independent substream with the same seed.
    Rng substream(std::uint64_t id) const { return Rng(seed_, detail::mix64(stream_ + detail::kGolden) + id); }

    std::uint64_t bits(std::uint64_t counter) const {
        return detail::mix64(key_ + counter * detail::kGolden);
    }

    // Uniform in [0,1), 53-bit resolution.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on the two 32-bit halves of one output.
    double normal(std::uint64_t counter) const {
        const std::uint64_t u = bits(counter);
        const double u1 = (static_cast<double>(u >> 32) + 0.5) * 0x1.0p-32;
        const double u2 = (static_cast<double>(u & 0xFFFFFFFFull) + 0.5) * 0x1.0p-32;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Unique counter for a (frame, pixel, channel, draw) coordinate.
    // Layout: 20-bit frame | 10-bit draw | 32-bit pixel | 2-bit channel.
    static std::uint64_t coord(std::uint64_t frame, std::uint64_t pixel,
                               std::uint64_t channel, std::uint64_t draw = 0) {
        return (frame << 44) | ((draw & 0x3FFull) << 34) | ((pixel & 0xFFFFFFFFull) << 2) |
               (channel & 0x3ull);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
};

// Convenience for sequential consumption (parameter init, rejection loops).
class RngSequence {
public:
    explicit RngSequence(Rng rng, std::uint64_t start = 0) : rng_(rng), next_(start) {}
    double uniform() { return rng_.uniform(next_++); }
    double normal() { return rng_.normal(next_++); }
    std::uint64_t bits() { return rng_.bits(next_++); }
    std::uint64_t position() const { return next_; }

private:
    Rng rng_;
    std::uint64_t next_;
};

}  // namespace bracketforge
