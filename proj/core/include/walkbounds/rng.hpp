#pragma once

#include <cstdint>

namespace walkbounds::rng {

/// splitmix64 output function; also used to derive substreams.
std::uint64_t splitmix64(std::uint64_t& state);

/// Per-path stream derivation: stream(seed, i) = splitmix64 state advanced
/// from seed + (i+1)·0x9E3779B97F4A7C15. Documented so that runs are
/// reproducible: path i of an estimate depends only on (seed, i), never on
/// execution order.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

/// xoshiro256++ with splitmix64 seeding. Small, fast, and fully
/// deterministic across platforms for a given seed.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform double in [0,1), from the top 53 bits.
    double uniform01();

private:
    std::uint64_t s_[4];
};

/// Inverse standard normal CDF (Acklam's rational approximation, refined
/// with one Halley step on erfc). Accurate to ~1e-15 over (0,1).
double normal_quantile(double p);

/// z-value of a symmetric two-sided interval at the given confidence level.
double z_for_confidence(double confidence_level);

/// Wilson score interval for k successes in n trials; returns the
/// half-width of the smallest interval centered at k/n that contains the
/// Wilson interval.
double wilson_half_width(std::int64_t successes, std::int64_t trials, double z);

}  // namespace walkbounds::rng
