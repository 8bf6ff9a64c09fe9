#include "chargedpoint/rng.hpp"

#include <cmath>
#include <numbers>

#include "chargedpoint/errors.hpp"

namespace chargedpoint {

namespace {

// splitmix64: the standard 64-bit finalizer, used to spread the root seed and
// to fold consumer names into it.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : SeededRng(seed, mix64(seed)) {}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t derived)
    : seed_(seed), engine_(derived) {}

SeededRng SeededRng::stream(std::string_view consumer) const {
    return SeededRng(seed_, mix64(mix64(seed_) ^ fnv1a(consumer)));
}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double SeededRng::normal(double sigma) {
    if (!(sigma > 0.0)) {
        throw InvalidParameterError("normal: sigma must be > 0");
    }
    if (has_spare_) {
        has_spare_ = false;
        return sigma * spare_;
    }
    // Box-Muller; u1 mapped into (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return sigma * (r * std::cos(a));
}

}  // namespace chargedpoint
