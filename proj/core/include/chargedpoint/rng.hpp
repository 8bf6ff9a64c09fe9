#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chargedpoint {

// Deterministic random source with named sub-streams.
//
// Every consumer of randomness (weight init, charged-point noise, dropout,
// data shuffling, ...) takes its own stream, derived from the root seed and
// the consumer name alone. Streams are therefore independent of the order or
// number of draws made elsewhere, which keeps experiment outputs bitwise
// reproducible when components are added or reordered.
//
// The engine is std::mt19937_64 (bit-exact across platforms). Uniform and
// Gaussian variates are derived in-house rather than through
// std::*_distribution, whose output is implementation-defined: uniform doubles
// take the top 53 bits of one engine draw, Gaussians come from the Box-Muller
// transform.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    // Independent generator for one named consumer. Derivation uses only the
    // root seed and the name, never the current engine state.
    SeededRng stream(std::string_view consumer) const;

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi);

    // N(0, sigma^2). sigma must be > 0.
    double normal(double sigma);

    std::uint64_t seed() const { return seed_; }

private:
    SeededRng(std::uint64_t seed, std::uint64_t derived);

    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace chargedpoint
