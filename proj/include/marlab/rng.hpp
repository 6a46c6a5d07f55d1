#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace marlab {

// Deterministic across platforms: mt19937_64's output sequence is fixed by
// the standard, and all real-valued draws below are explicit functions of
// raw 64-bit words (std::*_distribution is implementation-defined, so it is
// never used here).

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Substream seed for (master, replicate, label). Mixing: the master seed,
/// the FNV-1a hash of the label, and the replicate index are chained through
/// three splitmix64 rounds, so distinct labels or indices give unrelated
/// streams (collision probability ~2^-64 per pair).
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replicate_index,
                                 std::string_view stream_label) {
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64(s);
    s ^= fnv1a64(stream_label);
    std::uint64_t b = splitmix64(s);
    s ^= replicate_index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1 | b >> 63) ^ c;
}

/// Seeded stream of uniforms / normals / signs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; never zero, safe under log().
    double uniform01_open() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (two uniforms per draw, no caching).
    double normal() {
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    /// +1 or -1 with equal probability.
    double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace marlab
