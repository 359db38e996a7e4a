#pragma once

/**
 * @file word_stats.hpp
 * @brief Frequency and entropy statistics of finite digit words.
 *
 * Block occurrences are counted at start positions 1..n-k+1, i.e. only
 * windows lying fully inside the word. Entropies are in nats.
 */

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bigmath.hpp"
#include "cf_core.hpp"

namespace cfdim {

/// Counts of overlapping k-blocks of a word over the alphabet {1..N}.
struct BlockFrequencyTable {
    std::size_t k = 0;
    std::uint32_t alphabet_bound = 0;
    std::size_t word_length = 0;
    std::map<std::vector<std::uint32_t>, std::uint64_t> counts;

    std::uint64_t windows() const { return word_length - k + 1; }

    double frequency(const std::vector<std::uint32_t>& block) const {
        auto it = counts.find(block);
        if (it == counts.end()) return 0.0;
        return double(it->second) / double(windows());
    }
};

namespace detail {

inline std::uint32_t small_digit(const BigInt& a, std::uint32_t bound) {
    if (a > bound)
        throw std::domain_error("word_stats: digit exceeds the declared alphabet bound");
    return a.convert_to<std::uint32_t>();
}

}  // namespace detail

/// (count, count/n) of positions carrying the digit j.
inline std::pair<std::uint64_t, Rational> digit_frequency(const CylinderWord& word,
                                                          const BigInt& j) {
    if (word.empty()) throw std::domain_error("digit_frequency: empty word");
    if (j < 1) throw std::domain_error("digit_frequency: digit must be >= 1");
    std::uint64_t count = 0;
    for (const auto& a : word.digits)
        if (a == j) ++count;
    return {count, Rational(count, word.length())};
}

inline BlockFrequencyTable block_frequency_table(const CylinderWord& word, std::size_t k,
                                                 std::uint32_t alphabet_bound) {
    if (word.empty()) throw std::domain_error("block_frequency_table: empty word");
    if (k < 1 || k > word.length())
        throw std::domain_error("block_frequency_table: need 1 <= k <= word length");
    BlockFrequencyTable table;
    table.k = k;
    table.alphabet_bound = alphabet_bound;
    table.word_length = word.length();
    std::vector<std::uint32_t> w(word.length());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = detail::small_digit(word.digits[i], alphabet_bound);
    for (std::size_t j = 0; j + k <= w.size(); ++j)
        ++table.counts[std::vector<std::uint32_t>(w.begin() + j, w.begin() + j + k)];
    return table;
}

/// H_k(word) = sum over k-blocks u of phi(p(u|word)) in nats; bounded by
/// k log N, with the bound attained only by block equidistribution.
inline double block_entropy(const CylinderWord& word, std::size_t k) {
    if (word.empty()) throw std::domain_error("block_entropy: empty word");
    if (k < 1 || k > word.length())
        throw std::domain_error("block_entropy: need 1 <= k <= word length");
    std::map<std::vector<BigInt>, std::uint64_t> counts;
    for (std::size_t j = 0; j + k <= word.length(); ++j)
        ++counts[std::vector<BigInt>(word.digits.begin() + j, word.digits.begin() + j + k)];
    const double windows = double(word.length() - k + 1);
    KahanSum h;
    for (const auto& [block, c] : counts) h.add(entropy_phi(double(c) / windows));
    return h.value();
}

/// Exact cardinality of { w in {1..N}^n : H_k(w) <= k h } by exhaustive
/// lexicographic enumeration with incremental block counts.
inline std::uint64_t count_low_entropy_words(std::uint32_t N, std::uint32_t n, std::uint32_t k,
                                             double h, std::uint64_t budget = 100'000'000) {
    if (N < 1 || n < 1 || k < 1 || k > n)
        throw std::domain_error("count_low_entropy_words: need N,n >= 1 and 1 <= k <= n");
    double total = 1.0;
    for (std::uint32_t i = 0; i < n; ++i) {
        total *= N;
        if (total > double(budget))
            throw resource_error("count_low_entropy_words: N^n exceeds enumeration budget");
    }

    // Dense block counts indexed base-N; c_log tracks sum of c*log(c).
    std::uint64_t block_space = 1;
    for (std::uint32_t i = 0; i < k; ++i) block_space *= N;
    std::vector<std::uint32_t> counts(block_space, 0);
    std::vector<std::uint32_t> word(n, 1);
    const double windows = double(n - k + 1);
    const double log_windows = std::log(windows);
    const double threshold = double(k) * h;

    double c_log_sum = 0.0;
    auto block_code = [&](std::uint32_t start) {
        std::uint64_t code = 0;
        for (std::uint32_t i = 0; i < k; ++i) code = code * N + (word[start + i] - 1);
        return code;
    };
    auto add_block = [&](std::uint32_t start) {
        auto& c = counts[block_code(start)];
        if (c > 0) c_log_sum -= double(c) * std::log(double(c));
        ++c;
        c_log_sum += double(c) * std::log(double(c));
    };
    auto remove_block = [&](std::uint32_t start) {
        auto& c = counts[block_code(start)];
        c_log_sum -= double(c) * std::log(double(c));
        --c;
        if (c > 0) c_log_sum += double(c) * std::log(double(c));
    };

    for (std::uint32_t s = 0; s + k <= n; ++s) add_block(s);

    std::uint64_t matched = 0;
    while (true) {
        // H_k = log(windows) - (1/windows) * sum c log c
        const double hk = log_windows - c_log_sum / windows;
        if (hk <= threshold + 1e-12) ++matched;

        // Lexicographic increment; retract affected windows first.
        std::uint32_t pos = n;
        while (pos > 0 && word[pos - 1] == N) --pos;
        if (pos == 0) break;
        const std::uint32_t lo_window = (pos - 1 >= k - 1) ? pos - k : 0;
        const std::uint32_t hi_window = n - k;
        for (std::uint32_t s = lo_window; s <= hi_window; ++s) remove_block(s);
        ++word[pos - 1];
        for (std::uint32_t i = pos; i < n; ++i) word[i] = 1;
        for (std::uint32_t s = lo_window; s <= hi_window; ++s) add_block(s);
    }
    return matched;
}

/// Both sides of the basic-interval log bound: lhs = log|I_n(word)| from
/// the exact length, rhs = 2 sum_u tau_u(word) log(p_k(u)/q_k(u)) + 8 + 8n/2^k
/// over k-blocks u fully inside the word. Guarantees lhs <= rhs for words
/// with digits <= N.
inline std::pair<double, double> interval_log_bound_sides(const CylinderWord& word,
                                                          std::uint32_t N, std::size_t k) {
    if (word.empty()) throw std::domain_error("interval_log_bound_sides: empty word");
    if (k < 1 || k > word.length())
        throw std::domain_error("interval_log_bound_sides: need 1 <= k <= word length");
    auto table = block_frequency_table(word, k, N);  // validates digits <= N
    const double lhs = log_rational(interval_length(word));
    KahanSum sum;
    for (const auto& [block, count] : table.counts) {
        std::vector<BigInt> digits(block.begin(), block.end());
        auto st = detail::run_recursion(CylinderWord(std::move(digits)));
        sum.add(double(count) * (log_big(st.p) - log_big(st.q)));
    }
    const double n = double(word.length());
    const double rhs = 2.0 * sum.value() + 8.0 + 8.0 * n / std::pow(2.0, double(k));
    return {lhs, rhs};
}

}  // namespace cfdim
