#pragma once

/**
 * @file rng.hpp
 * @brief Seedable, reproducible random source.
 *
 * std::mt19937_64 is fully specified by the standard, but the
 * distribution adaptors are not; the bounded samplers here are written
 * out so the same seed yields the same stream on every platform.
 */

#include <cstdint>
#include <random>

#include "bigmath.hpp"

namespace cfdim {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform integer in [0, n); rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::domain_error("Rng::below: bound must be positive");
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        if (hi < lo) throw std::domain_error("Rng::range: empty range");
        return lo + below(hi - lo + 1);
    }

    /// Uniform double in [0, 1) with 53 random mantissa bits.
    double unit() { return double(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform big integer in [0, n); bit-level rejection.
    BigInt below_big(const BigInt& n) {
        if (n <= 0) throw std::domain_error("Rng::below_big: bound must be positive");
        const unsigned bits = msb(n) + 1;
        const unsigned words = (bits + 63) / 64;
        BigInt x;
        do {
            x = 0;
            for (unsigned i = 0; i < words; ++i) {
                x <<= 64;
                x |= BigInt(eng_());
            }
            x >>= (words * 64 - bits);
        } while (x >= n);
        return x;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace cfdim
