#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace pqsd {

/// splitmix64 (Steele, Lea, Flood 2014). Used for seeding and seed mixing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman, Vigna 2019), seeded through splitmix64.
/// Fixed algorithm so that seeds are portable across platforms.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next() {
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

    /// Uniform double in (0, 1].
    double uniform_oc() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform double in [0, 1).
    double uniform_co() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Box-Muller pair of independent standard normals.
    std::pair<double, double> gaussian_pair() {
        const double r = std::sqrt(-2.0 * std::log(uniform_oc()));
        const double phi = 2.0 * std::numbers::pi * uniform_co();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace pqsd
