#pragma once

/**
 * @file cf_core.hpp
 * @brief Exact continued-fraction arithmetic: convergents, basic-interval
 *        geometry, and Gauss-map expansion on rationals.
 *
 * Everything here is exact. Convergent numerators/denominators are
 * arbitrary-precision integers, interval endpoints and lengths are exact
 * rationals, and the Gauss map iterates on rationals only. Words of
 * length zero are rejected everywhere. All functions are pure; values
 * are immutable after construction and safe to share across threads.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bigmath.hpp"

namespace cfdim {

/// Finite digit string (a_1, ..., a_n); the index of a rank-n basic
/// interval. Digits are positive integers of arbitrary size.
struct CylinderWord {
    std::vector<BigInt> digits;

    CylinderWord() = default;
    explicit CylinderWord(std::vector<BigInt> d) : digits(std::move(d)) { validate(); }
    CylinderWord(std::initializer_list<std::uint64_t> d) {
        digits.reserve(d.size());
        for (auto a : d) digits.emplace_back(a);
        validate();
    }

    std::size_t length() const { return digits.size(); }
    bool empty() const { return digits.empty(); }

    void validate() const {
        for (const auto& a : digits)
            if (a < 1) throw std::domain_error("CylinderWord: digits must be >= 1");
    }

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (i) s += ',';
            s += digits[i].str();
        }
        s += ')';
        return s;
    }
};

/// Exact convergent p_n/q_n together with its index.
struct Convergent {
    BigInt p;
    BigInt q;
    int index = 0;
};

namespace detail {

/// Rolling state of the convergent recursion: (p_n, q_n, p_{n-1}, q_{n-1}),
/// seeded at n = 0 with p_0 = 0, q_0 = 1, p_{-1} = 1, q_{-1} = 0.
struct ConvergentState {
    BigInt p = 0, q = 1;            // p_n, q_n
    BigInt p_prev = 1, q_prev = 0;  // p_{n-1}, q_{n-1}

    void step(const BigInt& digit) {
        BigInt np = digit * p + p_prev;
        BigInt nq = digit * q + q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(np);
        q = std::move(nq);
    }
};

inline ConvergentState run_recursion(const CylinderWord& word) {
    if (word.empty()) throw std::domain_error("cf_core: empty word");
    ConvergentState st;
    for (const auto& a : word.digits) st.step(a);
    return st;
}

}  // namespace detail

/// All convergents (p_i, q_i), i = 1..n, of a nonempty word.
inline std::vector<Convergent> convergents(const CylinderWord& word) {
    if (word.empty()) throw std::domain_error("convergents: empty word");
    std::vector<Convergent> out;
    out.reserve(word.length());
    detail::ConvergentState st;
    int i = 0;
    for (const auto& a : word.digits) {
        st.step(a);
        out.push_back({st.p, st.q, ++i});
    }
    return out;
}

/// Value of the finite continued fraction [a_1, ..., a_n] as an exact rational.
inline Rational fold(const CylinderWord& word) {
    auto st = detail::run_recursion(word);
    return Rational(st.p, st.q);
}

/// Exact length of the rank-n basic interval: 1/(q_n (q_n + q_{n-1})).
inline Rational interval_length(const CylinderWord& word) {
    auto st = detail::run_recursion(word);
    return Rational(1, st.q * (st.q + st.q_prev));
}

/// Rank-n basic interval with exact endpoints p_n/q_n and
/// (p_n + p_{n-1})/(q_n + q_{n-1}), ordered left < right.
struct BasicInterval {
    Rational left;
    Rational right;
    CylinderWord word;

    Rational length() const { return right - left; }
};

inline BasicInterval basic_interval(const CylinderWord& word) {
    auto st = detail::run_recursion(word);
    Rational a(st.p, st.q);
    Rational b(st.p + st.p_prev, st.q + st.q_prev);
    if (b < a) std::swap(a, b);
    return BasicInterval{std::move(a), std::move(b), word};
}

/// Partial quotients of an exact rational x in (0,1) by iterating the
/// Gauss map T(x) = 1/x mod 1 exactly. Stops at max_digits or when the
/// orbit terminates; re-folding a terminated word reproduces x.
inline CylinderWord cf_expand(const Rational& x, std::size_t max_digits) {
    if (x <= 0 || x >= 1) throw std::domain_error("cf_expand: x must lie in (0,1)");
    std::vector<BigInt> digits;
    Rational y = x;
    while (digits.size() < max_digits && y != 0) {
        BigInt num = numerator(y), den = denominator(y);
        BigInt a = den / num;  // floor(1/y); exact since 0 < y < 1
        digits.push_back(a);
        y = Rational(den - a * num, num);  // 1/y - a
    }
    return CylinderWord(std::move(digits));
}

/// q_{n+1}(a_1,...,a_j, b, a_{j+1},...,a_n) / q_n(a_1,...,a_n) for an
/// insertion strictly inside the word (1 <= position < n). The value
/// lies in [(b+1)/2, b+1].
inline Rational insertion_ratio(const CylinderWord& word, std::size_t position, const BigInt& b) {
    if (word.length() < 2) throw std::domain_error("insertion_ratio: word must have length >= 2");
    if (position < 1 || position >= word.length())
        throw std::domain_error("insertion_ratio: position must satisfy 1 <= position < length");
    if (b < 1) throw std::domain_error("insertion_ratio: inserted digit must be >= 1");
    std::vector<BigInt> in = word.digits;
    in.insert(in.begin() + static_cast<std::ptrdiff_t>(position), b);
    auto inserted = detail::run_recursion(CylinderWord(std::move(in)));
    auto original = detail::run_recursion(word);
    return Rational(inserted.q, original.q);
}

/// Pair (|I(word)|, |I(word with the digit at position deleted)|),
/// both exact; the first is at most 8/(j+1)^2 times the second, where
/// j is the deleted digit.
inline std::pair<Rational, Rational> deletion_length_bound(const CylinderWord& word,
                                                           std::size_t position) {
    if (word.length() < 2) throw std::domain_error("deletion_length_bound: word length must be >= 2");
    if (position < 1 || position > word.length())
        throw std::domain_error("deletion_length_bound: position out of range");
    std::vector<BigInt> del = word.digits;
    del.erase(del.begin() + static_cast<std::ptrdiff_t>(position - 1));
    return {interval_length(word), interval_length(CylinderWord(std::move(del)))};
}

/// Lengths (|I'_n|, |I_n|, |I''_n|) of the two rank-n intervals adjacent
/// to I(word) (last digit decremented / incremented). Requires the last
/// digit to be >= 2; both neighbors lie in [|I_n|/3, 3|I_n|].
inline std::array<Rational, 3> adjacent_interval_lengths(const CylinderWord& word) {
    if (word.empty()) throw std::domain_error("adjacent_interval_lengths: empty word");
    if (word.digits.back() < 2)
        throw std::domain_error("adjacent_interval_lengths: last digit must be >= 2");
    std::vector<BigInt> lo = word.digits, hi = word.digits;
    lo.back() -= 1;
    hi.back() += 1;
    return {interval_length(CylinderWord(std::move(lo))), interval_length(word),
            interval_length(CylinderWord(std::move(hi)))};
}

}  // namespace cfdim
