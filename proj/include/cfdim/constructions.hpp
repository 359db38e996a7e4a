#pragma once

/**
 * @file constructions.hpp
 * @brief Lower-bound machinery: sampled points with controlled digit
 *        growth, the huge-digit-at-squares family F_z(b), its cylinder
 *        masses, and local-dimension profiles from exact interval lengths.
 *
 * All sampling takes an explicit seed and is reproducible. Interval
 * lengths use exact big-integer convergents throughout; digits at square
 * positions reach magnitude 2 b^{k^2}, far past floating-point range.
 */

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bigmath.hpp"
#include "cf_core.hpp"
#include "frequency.hpp"
#include "rng.hpp"

namespace cfdim {

/// Positive nondecreasing integer sequence c_1 <= c_2 <= ... -> infinity,
/// bounding the digit alphabet available at each position.
class GrowthSequence {
public:
    static GrowthSequence identity() {
        return GrowthSequence("n", [](std::uint64_t n) { return n; });
    }

    static GrowthSequence from_function(std::string name,
                                        std::function<std::uint64_t(std::uint64_t)> fn) {
        return GrowthSequence(std::move(name), std::move(fn));
    }

    std::uint64_t operator()(std::uint64_t n) const {
        if (n < 1) throw std::domain_error("GrowthSequence: index must be >= 1");
        const std::uint64_t c = fn_(n);
        if (c < 1) throw std::domain_error("GrowthSequence: values must be >= 1");
        return c;
    }

    const std::string& name() const { return name_; }

private:
    GrowthSequence(std::string name, std::function<std::uint64_t(std::uint64_t)> fn)
        : name_(std::move(name)), fn_(std::move(fn)) {}

    std::string name_;
    std::function<std::uint64_t(std::uint64_t)> fn_;
};

/// Sample a digit word of length n whose digit at position m is drawn
/// from the frequency law truncated-and-renormalized to {1..c_m}; when
/// the law has no mass there, the step falls back to the uniform law on
/// {1..c_m}. Digit frequencies converge to the prescribed law as n grows.
inline CylinderWord seed_point(const FrequencyVector& freq, const GrowthSequence& growth,
                               std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("seed_point: n must be >= 1");
    const std::uint64_t c_max = growth(n);
    if (c_max > (1u << 26))
        throw resource_error("seed_point: growth bound too large to tabulate");

    // Prefix CDF of the raw law on 1..c_max; per-position truncation
    // reduces to a bounded binary search.
    std::vector<double> cdf(c_max + 1, 0.0);
    {
        KahanSum acc;
        for (std::uint64_t j = 1; j <= c_max; ++j) {
            acc.add(freq.mass(j));
            cdf[j] = acc.value();
        }
    }

    Rng rng(seed);
    std::vector<BigInt> digits;
    digits.reserve(n);
    for (std::size_t m = 1; m <= n; ++m) {
        std::uint64_t c = growth(m);
        if (c > c_max) c = c_max;  // growth is nondecreasing by contract
        const double z = cdf[c];
        std::uint64_t digit;
        if (z > 0.0) {
            const double u = rng.unit() * z;
            std::uint64_t lo = 1, hi = c;
            while (lo < hi) {
                const std::uint64_t mid = (lo + hi) / 2;
                if (cdf[mid] > u) hi = mid; else lo = mid + 1;
            }
            digit = lo;
        } else {
            digit = 1 + rng.below(c);
        }
        digits.emplace_back(digit);
    }
    return CylinderWord(std::move(digits));
}

/// Parameters of the F_z(b) family: nonsquare positions copy the seed
/// word z (which must satisfy z_j <= j), square positions k^2 carry a
/// digit from (b^{k^2}, 2 b^{k^2}].
struct FzParameters {
    CylinderWord z;
    double b = 0.0;
    std::size_t depth = 0;

    FzParameters(CylinderWord z_, double b_, std::size_t depth_)
        : z(std::move(z_)), b(b_), depth(depth_) {
        if (!(b > 1.0)) throw std::domain_error("FzParameters: b must exceed 1");
        if (z.length() < depth) throw std::domain_error("FzParameters: seed word shorter than depth");
        for (std::size_t j = 0; j < z.length(); ++j)
            if (z.digits[j] > j + 1)
                throw std::domain_error("FzParameters: seed word must satisfy z_j <= j");
    }

    static FzParameters all_ones(double b, std::size_t depth) {
        return FzParameters(CylinderWord(std::vector<BigInt>(depth, BigInt(1))), b, depth);
    }
};

/// Exact integer bounds of the square-position digit range
/// (b^{power}, 2 b^{power}]: {floor(b^power) + 1, floor(2 b^power)}.
inline std::pair<BigInt, BigInt> fz_digit_range(double b, unsigned power) {
    BigInt lo = floor_pow_scaled(b, power) + 1;
    BigInt hi = floor_pow_scaled(b, power, 2);
    return {std::move(lo), std::move(hi)};
}

/// Word of length n with uniformly drawn huge digits at square positions
/// and the seed word's digits elsewhere. Same seed, same word.
inline CylinderWord fz_point(const FzParameters& params, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("fz_point: n must be >= 1");
    if (params.depth < n) throw std::domain_error("fz_point: depth < n");
    Rng rng(seed);
    std::vector<BigInt> digits;
    digits.reserve(n);
    for (std::size_t pos = 1; pos <= n; ++pos) {
        const auto root = isqrt_u64(pos);
        if (root * root == pos) {
            auto [lo, hi] = fz_digit_range(params.b, static_cast<unsigned>(pos));
            if (hi < lo)
                throw std::domain_error("fz_point: empty digit range (b too close to 1)");
            digits.push_back(lo + rng.below_big(hi - lo + 1));
        } else {
            digits.push_back(params.z.digits[pos - 1]);
        }
    }
    return CylinderWord(std::move(digits));
}

/// log mu(I_m) = -(sum_{k<=n} k^2) log b with n = floor(sqrt(m)), i.e.
/// the mass is constant on [n^2, (n+1)^2) and drops by b^{-(n+1)^2} at
/// the next square.
inline double fz_measure_log_mass(std::uint64_t m, double b) {
    if (m < 1) throw std::domain_error("fz_measure_log_mass: m must be >= 1");
    if (!(b > 1.0)) throw std::domain_error("fz_measure_log_mass: b must exceed 1");
    const std::uint64_t n = isqrt_u64(m);
    const double sum_sq = double(n) * double(n + 1) * double(2 * n + 1) / 6.0;
    return -sum_sq * std::log(b);
}

struct ProfilePoint {
    std::uint64_t m = 0;
    std::uint64_t n = 0;       // floor(sqrt(m+1)): the mass block of I_{m+1}
    double log_mass = 0.0;     // log mu(I_{m+1})
    double log_length = 0.0;   // log |I_{m+1}| from exact convergents
    double ratio = 0.0;        // log_mass / log_length
    double ratio_factor3 = 0.0;  // with the covering constants: log 3mu / log |I|/3
};

struct ProfileResult {
    std::vector<ProfilePoint> points;
    bool verified = true;  // square-position digits matched the b-ranges
};

/// Local-dimension proxy at each depth m: the mass of the enclosing
/// cylinder against its exact length, ratio = log mu(I_{m+1}) / log |I_{m+1}|.
/// The factor-3 corrections of the covering argument are reported
/// separately per point rather than folded into the ratio.
inline ProfileResult local_dimension_profile(const CylinderWord& word, double b,
                                             const std::vector<std::uint64_t>& depths) {
    if (word.empty()) throw std::domain_error("local_dimension_profile: empty word");
    if (!(b > 1.0)) throw std::domain_error("local_dimension_profile: b must exceed 1");
    std::uint64_t max_m = 0;
    for (auto m : depths) {
        if (m < 1) throw std::domain_error("local_dimension_profile: depths must be >= 1");
        if (m + 1 > word.length())
            throw std::domain_error("local_dimension_profile: depth m needs m+1 <= word length");
        max_m = std::max(max_m, m);
    }

    // One pass of the convergent recursion; keep log lengths per rank.
    std::vector<double> log_len(max_m + 2, 0.0);
    {
        detail::ConvergentState st;
        for (std::uint64_t i = 1; i <= max_m + 1; ++i) {
            st.step(word.digits[i - 1]);
            log_len[i] = -(log_big(st.q) + log_big(st.q + st.q_prev));
        }
    }

    ProfileResult result;
    for (std::uint64_t pos = 1; pos * pos <= max_m + 1; ++pos) {
        auto [lo, hi] = fz_digit_range(b, static_cast<unsigned>(pos * pos));
        const BigInt& d = word.digits[pos * pos - 1];
        if (d < lo || d > hi) result.verified = false;
    }

    const double log3 = std::log(3.0);
    result.points.reserve(depths.size());
    for (auto m : depths) {
        ProfilePoint pt;
        pt.m = m;
        pt.n = isqrt_u64(m + 1);
        pt.log_mass = fz_measure_log_mass(m + 1, b);
        pt.log_length = log_len[m + 1];
        pt.ratio = pt.log_mass / pt.log_length;
        pt.ratio_factor3 = (log3 + pt.log_mass) / (pt.log_length - log3);
        result.points.push_back(pt);
    }
    return result;
}

}  // namespace cfdim
