#pragma once

#include <cstdint>
#include <random>

namespace rotorlab {

// SplitMix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seedable 64-bit generator (mt19937_64) with explicit, platform-stable
// conversions to doubles. std::*_distribution is avoided because its
// algorithm is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller, deterministic, one spare cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double c = std::cos(6.283185307179586 * u2);
        double s = std::sin(6.283185307179586 * u2);
        spare_ = r * s;
        have_spare_ = true;
        return r * c;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream-splitting rule: trajectory i of a run seeded with `base` draws from
// an mt19937_64 seeded with splitmix64(base ^ GAMMA*(i+1)). Partitioning an
// ensemble across workers therefore cannot change any trajectory's stream.
inline Rng trajectory_rng(std::uint64_t base, std::uint64_t index) {
    return Rng(splitmix64(base ^ (0x9E3779B97F4A7C15ULL * (index + 1))));
}

} // namespace rotorlab
