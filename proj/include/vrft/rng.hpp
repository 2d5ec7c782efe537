#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vrft {

// splitmix64 finalizer, used to derive independent sub-seeds from a master
// seed. Adding runs or stages never perturbs the seeds of earlier ones.
inline std::uint64_t seed_mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t seed_mix(std::uint64_t master, std::uint64_t salt) {
    return seed_mix(master + 0x9E3779B97F4A7C15ull * (salt + 1));
}

// Seeded generator with explicit uniform/normal conversions. The standard
// library's distributions are implementation-defined, so draws go through
// our own bit manipulation and Box-Muller to keep streams reproducible
// across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

    double normal() {
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace vrft
