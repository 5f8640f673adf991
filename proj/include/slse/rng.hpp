#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace slse {

// Deterministic, platform-independent generator: xoshiro256++ seeded through
// splitmix64. All variate transforms are implemented here (never via
// std::*_distribution, whose output differs between standard libraries), so a
// seed produces the same stream on every machine.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // (0,1] for the log argument.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    // Uniform integer in [0, bound) by masked rejection (no modulo bias).
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t mask = ~std::uint64_t{0} >> countl_zero_u64(bound - 1);
        std::uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= bound);
        return v;
    }

    // Fisher-Yates permutation of [0, n).
    std::vector<std::uint32_t> permutation(std::size_t n) {
        std::vector<std::uint32_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

    // Independent substream addressed by (tag, index). Used to keep model,
    // sketch and Hessian draws decoupled from one another.
    static std::uint64_t derive(std::uint64_t seed, const char* tag, std::uint64_t index = 0) {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (const char* c = tag; *c; ++c) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(*c));
            h *= 0x100000001b3ULL;
        }
        std::uint64_t x = seed ^ h ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        std::uint64_t mixed = splitmix64(x);
        return mixed ^ splitmix64(x);
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static int countl_zero_u64(std::uint64_t x) {
        int n = 0;
        if (x == 0) return 64;
        while (!(x & 0x8000000000000000ULL)) {
            x <<= 1;
            ++n;
        }
        return n;
    }

    std::uint64_t state_[4] = {};
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace slse
