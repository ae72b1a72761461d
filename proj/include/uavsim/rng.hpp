#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace uavsim {

// splitmix64; used to stretch a seed and to mix label bytes into substream
// seeds. Output is fully specified, so streams are stable across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a4ca9da2d058ULL;
    return z ^ (z >> 31);
}

// Derives the seed of a named substream from a base seed. Same (base, label)
// always yields the same substream, independent of any other stream's use.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ base;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;  // FNV-1a
    }
    std::uint64_t s = h;
    return splitmix64(s);
}

// Deterministic random stream. mt19937_64 raw output is specified by the
// standard; all distributions below are implemented here rather than via
// std:: distribution objects, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n)
    int uniform_int(int n) { return static_cast<int>(uniform() * n); }

    double rayleigh(double scale) {
        double u = uniform();
        // inverse CDF; 1-u avoids log(0)
        return scale * std::sqrt(-2.0 * std::log(1.0 - u));
    }

    // Knuth's product method on mean chunks <= 20 so exp() never underflows.
    long poisson(double mean) {
        long count = 0;
        while (mean > 0.0) {
            double chunk = mean > 20.0 ? 20.0 : mean;
            mean -= chunk;
            double limit = std::exp(-chunk);
            double prod = uniform();
            while (prod > limit) {
                ++count;
                prod *= uniform();
            }
        }
        return count;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace uavsim
