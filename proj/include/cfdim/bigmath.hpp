#pragma once

/**
 * @file bigmath.hpp
 * @brief Arbitrary-precision integer/rational aliases and numeric helpers.
 *
 * All exact arithmetic in the library runs on boost::multiprecision
 * (cpp_int / cpp_rational). Floating point only enters when a logarithm
 * is requested; logs of big values are computed from the bit length plus
 * a 64-bit mantissa correction, which keeps well above 50 bits of
 * relative precision at any magnitude.
 */

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfdim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Thrown when an enumeration would exceed its configured budget.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a constraint set has no feasible point.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an iterative solver hits its cap; carries the last iterate.
struct convergence_error : std::runtime_error {
    double last_value;
    explicit convergence_error(const std::string& what, double last)
        : std::runtime_error(what), last_value(last) {}
};

/// Natural log of a positive big integer (bit length + mantissa correction).
inline double log_big(const BigInt& n) {
    if (n <= 0) throw std::domain_error("log_big: argument must be positive");
    const unsigned bits = msb(n);  // index of highest set bit
    if (bits <= 62) return std::log(n.convert_to<double>());
    const unsigned shift = bits - 62;
    const BigInt top = n >> shift;
    return std::log(top.convert_to<double>()) + double(shift) * M_LN2;
}

/// Natural log of a positive exact rational.
inline double log_rational(const Rational& x) {
    if (x <= 0) throw std::domain_error("log_rational: argument must be positive");
    return log_big(numerator(x)) - log_big(denominator(x));
}

/// Compensated (Kahan) accumulator; keeps cylinder sums order-insensitive
/// well below 1e-12.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// phi(t) = -t log t with phi(0) = 0.
inline double entropy_phi(double t) {
    if (t <= 0.0) return 0.0;
    return -t * std::log(t);
}

/// Integer square root (largest r with r*r <= m).
inline std::uint64_t isqrt_u64(std::uint64_t m) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m)));
    while (r > 0 && r * r > m) --r;
    while ((r + 1) * (r + 1) <= m) ++r;
    return r;
}

/// Exact floor(scale * b^power) for a double b > 0, via the binary
/// decomposition b = M * 2^e with a 53-bit integer mantissa M.
inline BigInt floor_pow_scaled(double b, unsigned power, unsigned scale = 1) {
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::domain_error("floor_pow_scaled: base must be positive and finite");
    int ex = 0;
    const double mant = std::frexp(b, &ex);  // b = mant * 2^ex, mant in [0.5, 1)
    const auto m53 = static_cast<std::int64_t>(std::ldexp(mant, 53));
    BigInt num = pow(BigInt(m53), power);
    num *= scale;
    const std::int64_t shift = static_cast<std::int64_t>(power) * (ex - 53);
    if (shift >= 0) return num << shift;
    return num >> (-shift);
}

}  // namespace cfdim
