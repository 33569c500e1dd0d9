#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mixsel {

/// Seeded random stream used throughout the library.
///
/// Wraps std::mt19937_64 but generates uniforms and normals with explicit
/// transforms (53-bit uniform, Marsaglia polar normal) so a seed produces the
/// same stream on every standard library implementation. Independent
/// substreams are derived with child_seed(root, index); the convention is one
/// child per replication index, and nested children for stages within a
/// replication (data generation, initialization, restarts).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform draw on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw (Marsaglia polar method, cached spare).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Uniform integer in [0, bound). Rejection-free modulo is acceptable
    /// here; bound is tiny relative to 2^64 so the bias is negligible.
    std::uint64_t below(std::uint64_t bound) { return gen_() % bound; }

    /// Draws a seed for a dependent substream.
    std::uint64_t next_seed() { return gen_(); }

    /// Deterministic substream seed: splitmix64 finalizer over root and index.
    static std::uint64_t child_seed(std::uint64_t root, std::uint64_t index) {
        std::uint64_t z = root + (index + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mixsel
