#pragma once

/**
 * @file verify.hpp
 * @brief Randomized and exhaustive property suites for the exact
 *        continued-fraction lemmas. Comparisons on convergents and
 *        interval lengths are exact rational comparisons; no tolerance.
 *
 * Suites are named after the facts they check:
 *   2.1 determinant identity and denominator bounds
 *   2.2 digit-insertion ratio bounds
 *   2.3 interval endpoints, exact length identity, length sandwich
 *   2.4 digit-deletion length bound with constant 8/(j+1)^2
 *   2.5 factor-3 bounds for adjacent intervals
 *   2.6 the interval log bound (checked in floating point; the additive
 *       slack dwarfs rounding)
 *   2.7 the low-entropy counting bound via exhaustive enumeration
 *   3.1 nonnegativity of the Jensen gap on random chains
 */

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cf_core.hpp"
#include "markov.hpp"
#include "rng.hpp"
#include "word_stats.hpp"

namespace cfdim {

struct VerifyOptions {
    std::uint64_t trials = 10000;
    std::uint64_t seed = 2024;
    std::uint32_t digit_max = 100;
    std::uint32_t len_max = 50;
};

struct VerifyReport {
    std::string suite;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    std::vector<std::string> counterexamples;  // at most 5 kept verbatim
    double seconds = 0.0;

    bool passed() const { return failures == 0; }

    void record_failure(const std::string& detail) {
        ++failures;
        if (counterexamples.size() < 5) counterexamples.push_back(detail);
    }
};

namespace detail {

inline CylinderWord random_word(Rng& rng, std::uint32_t digit_max, std::uint32_t len_max,
                                std::uint32_t len_min = 1) {
    const auto len = static_cast<std::size_t>(rng.range(len_min, len_max));
    std::vector<BigInt> digits;
    digits.reserve(len);
    for (std::size_t i = 0; i < len; ++i) digits.emplace_back(rng.range(1, digit_max));
    return CylinderWord(std::move(digits));
}

template <typename Body>
VerifyReport run_suite(const std::string& name, std::uint64_t trials, Body&& body) {
    VerifyReport rep;
    rep.suite = name;
    rep.trials = trials;
    const auto t0 = std::chrono::steady_clock::now();
    body(rep);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace detail

/// Lemma 2.1: p_{n-1} q_n - p_n q_{n-1} = (-1)^n, q_n >= 2^((n-1)/2),
/// and prod a_k <= q_n <= prod (a_k + 1), all exact.
inline VerifyReport verify_determinant_and_bounds(const VerifyOptions& opt) {
    return detail::run_suite("2.1", opt.trials, [&](VerifyReport& rep) {
        Rng rng(opt.seed);
        for (std::uint64_t t = 0; t < opt.trials; ++t) {
            auto word = detail::random_word(rng, opt.digit_max, opt.len_max);
            auto cs = convergents(word);
            BigInt p_prev = 0, q_prev = 1;  // p_0, q_0
            BigInt prod_lo = 1, prod_hi = 1;
            for (std::size_t n = 0; n < cs.size(); ++n) {
                const BigInt det = p_prev * cs[n].q - cs[n].p * q_prev;
                const bool even = (n + 1) % 2 == 0;
                if (det != (even ? 1 : -1))
                    rep.record_failure("determinant: word=" + word.str() + " n=" +
                                       std::to_string(n + 1) + " det=" + det.str());
                // q_n^2 >= 2^(n-1) is the exact form of q_n >= 2^((n-1)/2).
                if (cs[n].q * cs[n].q < (BigInt(1) << n))
                    rep.record_failure("q growth: word=" + word.str() + " n=" +
                                       std::to_string(n + 1) + " q=" + cs[n].q.str());
                prod_lo *= word.digits[n];
                prod_hi *= word.digits[n] + 1;
                if (cs[n].q < prod_lo || cs[n].q > prod_hi)
                    rep.record_failure("q product bounds: word=" + word.str() + " n=" +
                                       std::to_string(n + 1) + " q=" + cs[n].q.str());
                p_prev = cs[n].p;
                q_prev = cs[n].q;
            }
        }
    });
}

/// Lemma 2.2: (b+1)/2 <= q_{n+1}(with b inserted)/q_n <= b+1 for
/// insertions strictly inside the word.
inline VerifyReport verify_insertion_bounds(const VerifyOptions& opt) {
    return detail::run_suite("2.2", opt.trials, [&](VerifyReport& rep) {
        Rng rng(opt.seed + 1);
        for (std::uint64_t t = 0; t < opt.trials; ++t) {
            auto word = detail::random_word(rng, opt.digit_max, opt.len_max, 2);
            const auto pos = static_cast<std::size_t>(rng.range(1, word.length() - 1));
            const BigInt b(rng.range(1, opt.digit_max));
            const Rational ratio = insertion_ratio(word, pos, b);
            if (ratio * 2 < Rational(b + 1) || ratio > Rational(b + 1))
                rep.record_failure("insertion: word=" + word.str() + " pos=" +
                                   std::to_string(pos) + " b=" + b.str() + " ratio=" +
                                   numerator(ratio).str() + "/" + denominator(ratio).str());
        }
    });
}

/// Lemma 2.3 and the sandwich: |I| = 1/(q_n(q_n+q_{n-1})) from the exact
/// endpoints, and 1/(2 q_n^2) <= |I| <= 1/q_n^2.
inline VerifyReport verify_interval_identities(const VerifyOptions& opt) {
    return detail::run_suite("2.3", opt.trials, [&](VerifyReport& rep) {
        Rng rng(opt.seed + 2);
        for (std::uint64_t t = 0; t < opt.trials; ++t) {
            auto word = detail::random_word(rng, opt.digit_max, opt.len_max);
            auto st = detail::run_recursion(word);
            auto iv = basic_interval(word);
            const Rational len = iv.length();
            if (len != Rational(1, st.q * (st.q + st.q_prev)))
                rep.record_failure("length identity: word=" + word.str());
            const BigInt q2 = st.q * st.q;
            if (len * 2 * q2 < 1 || len * q2 > 1)
                rep.record_failure("length sandwich: word=" + word.str());
            const Rational a(st.p, st.q), bnd(st.p + st.p_prev, st.q + st.q_prev);
            if (!((iv.left == a && iv.right == bnd) || (iv.left == bnd && iv.right == a)))
                rep.record_failure("endpoints: word=" + word.str());
        }
    });
}

/// Lemma 2.4: |I(..., j, ...)| <= 8/(j+1)^2 |I(..., j-hat, ...)|.
inline VerifyReport verify_deletion_bound(const VerifyOptions& opt) {
    return detail::run_suite("2.4", opt.trials, [&](VerifyReport& rep) {
        Rng rng(opt.seed + 3);
        for (std::uint64_t t = 0; t < opt.trials; ++t) {
            auto word = detail::random_word(rng, opt.digit_max, opt.len_max, 2);
            const auto pos = static_cast<std::size_t>(rng.range(1, word.length()));
            const BigInt j = word.digits[pos - 1];
            auto [orig, deleted] = deletion_length_bound(word, pos);
            if (orig * (j + 1) * (j + 1) > deleted * 8)
                rep.record_failure("deletion: word=" + word.str() + " pos=" + std::to_string(pos));
        }
    });
}

/// Lemma 2.5: both adjacent rank-n intervals lie within a factor 3.
inline VerifyReport verify_adjacent_bounds(const VerifyOptions& opt) {
    return detail::run_suite("2.5", opt.trials, [&](VerifyReport& rep) {
        Rng rng(opt.seed + 4);
        for (std::uint64_t t = 0; t < opt.trials; ++t) {
            auto word = detail::random_word(rng, opt.digit_max, opt.len_max);
            word.digits.back() = BigInt(rng.range(2, std::max<std::uint32_t>(2, opt.digit_max)));
            auto [lo, mid, hi] = adjacent_interval_lengths(word);
            for (const Rational& nb : {lo, hi})
                if (nb * 3 < mid || nb > mid * 3)
                    rep.record_failure("adjacency: word=" + word.str());
        }
    });
}

/// Lemma 2.6 (the interval log bound), randomized over bounded-digit words.
inline VerifyReport verify_interval_log_bound(std::uint64_t trials, std::uint64_t seed,
                                              std::uint32_t N = 5, std::uint32_t len_max = 40,
                                              const std::vector<std::size_t>& ks = {1, 2, 3}) {
    return detail::run_suite("2.6", trials, [&](VerifyReport& rep) {
        Rng rng(seed + 5);
        for (std::uint64_t t = 0; t < trials; ++t) {
            auto word = detail::random_word(rng, N, len_max,
                                            static_cast<std::uint32_t>(ks.back()));
            for (std::size_t k : ks) {
                auto [lhs, rhs] = interval_log_bound_sides(word, N, k);
                if (lhs > rhs)
                    rep.record_failure("log bound: word=" + word.str() + " k=" +
                                       std::to_string(k) + " lhs=" + std::to_string(lhs) +
                                       " rhs=" + std::to_string(rhs));
            }
        }
    });
}

/// Lemma 2.7: exhaustive count of low-entropy words against exp(n(h+eps)).
inline VerifyReport verify_counting_bound(std::uint32_t N = 2,
                                          std::uint32_t n_lo = 8, std::uint32_t n_hi = 16,
                                          const std::vector<std::uint32_t>& ks = {1, 2},
                                          const std::vector<double>& hs = {0.1, 0.3, 0.5},
                                          double eps = 0.5) {
    return detail::run_suite("2.7", 0, [&](VerifyReport& rep) {
        for (std::uint32_t n = n_lo; n <= n_hi; ++n) {
            for (std::uint32_t k : ks) {
                for (double h : hs) {
                    ++rep.trials;
                    const std::uint64_t count = count_low_entropy_words(N, n, k, h);
                    const double bound = std::exp(double(n) * (h + eps));
                    if (double(count) > bound)
                        rep.record_failure("counting: N=" + std::to_string(N) + " n=" +
                                           std::to_string(n) + " k=" + std::to_string(k) +
                                           " h=" + std::to_string(h) + " count=" +
                                           std::to_string(count));
                }
            }
        }
    });
}

/// Jensen gap nonnegativity over random order-1 chains.
inline VerifyReport verify_jensen_gap(std::uint64_t trials, std::uint64_t seed,
                                      std::size_t k = 3) {
    return detail::run_suite("3.1", trials, [&](VerifyReport& rep) {
        Rng rng(seed + 7);
        for (std::uint64_t t = 0; t < trials; ++t) {
            std::vector<double> kernel(9);
            for (std::size_t row = 0; row < 3; ++row) {
                double sum = 0.0;
                for (std::size_t a = 0; a < 3; ++a) {
                    kernel[row * 3 + a] = 0.05 + rng.unit();
                    sum += kernel[row * 3 + a];
                }
                for (std::size_t a = 0; a < 3; ++a) kernel[row * 3 + a] /= sum;
            }
            auto P = make_markov(3, {1, 2, 3}, 1, kernel);
            if (jensen_gap(P, k) < -1e-12)
                rep.record_failure("jensen: trial " + std::to_string(t));
        }
    });
}

/// Run the named suite ("2.1".."2.7", "3.1", or "all").
inline std::vector<VerifyReport> verify_suites(const std::string& name, const VerifyOptions& opt) {
    std::vector<VerifyReport> out;
    const bool all = name == "all";
    if (all || name == "2.1") out.push_back(verify_determinant_and_bounds(opt));
    if (all || name == "2.2") out.push_back(verify_insertion_bounds(opt));
    if (all || name == "2.3") out.push_back(verify_interval_identities(opt));
    if (all || name == "2.4") out.push_back(verify_deletion_bound(opt));
    if (all || name == "2.5") out.push_back(verify_adjacent_bounds(opt));
    if (all || name == "2.6")
        out.push_back(verify_interval_log_bound(std::min<std::uint64_t>(opt.trials, 1000), opt.seed));
    if (all || name == "2.7") out.push_back(verify_counting_bound());
    if (all || name == "3.1")
        out.push_back(verify_jensen_gap(std::min<std::uint64_t>(opt.trials, 2000), opt.seed));
    if (out.empty()) throw std::domain_error("verify: unknown suite \"" + name + "\"");
    return out;
}

}  // namespace cfdim
