#pragma once

#include <cstdint>

#include "umbra/vec.hpp"

namespace umbra {

/// splitmix64 step; the whole tool derives its randomness from one master
/// seed through index hashing so results are reproducible under any thread
/// count.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stateless hash of (seed, index) into a fresh 64-bit value.
inline std::uint64_t hash_index(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    Rng(std::uint64_t seed, std::uint64_t index) : state(hash_index(seed, index)) {}

    std::uint64_t next_u64() { return splitmix64(state); }
    /// Uniform in [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    Vec3 unit_vector() {
        // z uniform in [-1,1], azimuth uniform
        double z = uniform(-1.0, 1.0);
        double phi = uniform(0.0, 6.283185307179586476925286766559);
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {rho * std::cos(phi), rho * std::sin(phi), z};
    }
};

}  // namespace umbra
