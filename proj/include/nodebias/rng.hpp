#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace nodebias {

// SplitMix64. All seeded behaviour in this project (initialization, splits,
// truncation, synthetic data, Monte-Carlo draws) goes through this generator
// so that a seed means the same thing on every platform; the standard
// library's distributions are not reproducible across implementations.
//
// Draw conventions, fixed for reproducibility:
//   next_double()   = (next() >> 11) * 2^-53, uniform in [0, 1)
//   next_below(n)   = Lemire's unbiased-enough multiply-shift reduction
//   next_gaussian() = Box-Muller pair, second value cached
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [-limit, limit).
    double next_symmetric(double limit) { return (2.0 * next_double() - 1.0) * limit; }

    uint64_t next_below(uint64_t bound) {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u in (0, 1] avoids log(0).
        const double u = 1.0 - next_double();
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline uint64_t splitmix_mix(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and salts.
inline uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> salts) {
    uint64_t h = splitmix_mix(base);
    for (uint64_t s : salts) h = splitmix_mix(h ^ s);
    return h;
}

inline uint64_t fnv1a64(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

} // namespace nodebias
