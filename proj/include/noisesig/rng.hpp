#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace noisesig {

// SplitMix64 finalizer. Used to derive independent substream seeds from
// (seed, channel, index) triples; the full scheme is documented in the README.
inline std::uint64_t fmix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t channel, std::uint64_t index = 0) {
    std::uint64_t z = fmix64(seed + 0x9e3779b97f4a7c15ull);
    z = fmix64(z ^ (channel * 0xff51afd7ed558ccdull + 0x2545f4914f6cdd1dull));
    z = fmix64(z ^ (index * 0xc6a4a7935bd1e995ull + 0x9e3779b97f4a7c15ull));
    return z;
}

// mt19937_64 is bit-exact across conforming implementations; the variate
// transforms below are our own so streams are portable (std distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // standard normal, Box-Muller with cached spare
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Exp(1) via inverse CDF
    double exponential() { return -std::log(1.0 - uniform()); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace noisesig
