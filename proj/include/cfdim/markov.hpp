#pragma once

/**
 * @file markov.hpp
 * @brief Stationary multi-step Markov measures on bounded-digit symbolic
 *        space: cylinder probabilities, entropy rate, Lyapunov functional,
 *        digit-marginal truncation, and the k-cylinder perturbation.
 *
 * A measure of order m (i.e. a (k-1)-step measure with k = m+1) is stored
 * as a transition kernel over states = support^m together with its
 * stationary state distribution, so stationarity holds by construction.
 * Digits with zero prescribed frequency are dropped from the alphabet
 * rather than carried as zero rows; perturb() re-introduces them.
 *
 * Measures are immutable after construction. Cylinder-sum functionals use
 * compensated summation in a fixed enumeration order.
 */

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bigmath.hpp"
#include "cf_core.hpp"
#include "frequency.hpp"

namespace cfdim {

struct MarkovMeasure {
    std::uint32_t alphabet_bound = 0;        ///< declared N
    std::vector<std::uint32_t> support;      ///< active digits, ascending
    std::uint32_t order = 0;                 ///< memory m = k-1
    std::vector<double> kernel;              ///< [state * A + a], row-stochastic
    std::vector<double> pi;                  ///< stationary distribution on states

    std::uint32_t alphabet_size() const { return static_cast<std::uint32_t>(support.size()); }

    std::uint64_t state_count() const {
        std::uint64_t s = 1;
        for (std::uint32_t i = 0; i < order; ++i) s *= alphabet_size();
        return s;
    }

    double transition(std::uint64_t state, std::uint32_t a_idx) const {
        return kernel[state * alphabet_size() + a_idx];
    }

    /// Shift the state window left and append digit index a.
    std::uint64_t next_state(std::uint64_t state, std::uint32_t a_idx) const {
        if (order == 0) return 0;
        const std::uint64_t tail_span = state_count() / alphabet_size();
        return (state % tail_span) * alphabet_size() + a_idx;
    }

    std::uint32_t first_coordinate(std::uint64_t state) const {
        return static_cast<std::uint32_t>(state / (state_count() / alphabet_size()));
    }

    /// Index of a digit within the support, or -1 when absent.
    int digit_index(const BigInt& digit) const {
        if (digit < 1) throw std::domain_error("MarkovMeasure: digits must be >= 1");
        if (digit > alphabet_bound)
            throw std::domain_error("MarkovMeasure: digit exceeds the alphabet bound");
        const auto d = digit.convert_to<std::uint32_t>();
        auto it = std::lower_bound(support.begin(), support.end(), d);
        if (it == support.end() || *it != d) return -1;
        return static_cast<int>(it - support.begin());
    }

    /// Stationary single-digit marginals, indexed by support position.
    std::vector<double> digit_marginals() const {
        const std::uint32_t A = alphabet_size();
        std::vector<double> m(A, 0.0);
        if (order == 0) {
            for (std::uint32_t a = 0; a < A; ++a) m[a] = kernel[a];
        } else {
            for (std::uint64_t s = 0; s < state_count(); ++s) m[first_coordinate(s)] += pi[s];
        }
        return m;
    }
};

namespace detail {

/// Stationary row vector of a row-stochastic state chain by power
/// iteration from the uniform distribution.
inline std::vector<double> stationary_distribution(const MarkovMeasure& P, double tol = 1e-14,
                                                   int max_iter = 100000) {
    const std::uint64_t S = P.state_count();
    const std::uint32_t A = P.alphabet_size();
    std::vector<double> v(S, 1.0 / double(S)), w(S);
    for (int it = 0; it < max_iter; ++it) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::uint64_t s = 0; s < S; ++s) {
            const double vs = v[s];
            if (vs == 0.0) continue;
            for (std::uint32_t a = 0; a < A; ++a)
                w[P.next_state(s, a)] += vs * P.transition(s, a);
        }
        double dist = 0.0, total = 0.0;
        for (std::uint64_t s = 0; s < S; ++s) {
            dist += std::abs(w[s] - v[s]);
            total += w[s];
        }
        for (auto& x : w) x /= total;
        v.swap(w);
        if (dist < tol) break;
    }
    return v;
}

inline double stationarity_residual(const MarkovMeasure& P) {
    const std::uint64_t S = P.state_count();
    const std::uint32_t A = P.alphabet_size();
    std::vector<double> w(S, 0.0);
    for (std::uint64_t s = 0; s < S; ++s)
        for (std::uint32_t a = 0; a < A; ++a) w[P.next_state(s, a)] += P.pi[s] * P.transition(s, a);
    double tv = 0.0;
    for (std::uint64_t s = 0; s < S; ++s) tv += std::abs(w[s] - P.pi[s]);
    return tv / 2.0;
}

}  // namespace detail

/// Assemble and validate a measure from a kernel; the stationary state
/// distribution is computed by power iteration unless supplied.
inline MarkovMeasure make_markov(std::uint32_t alphabet_bound, std::vector<std::uint32_t> support,
                                 std::uint32_t order, std::vector<double> kernel,
                                 std::vector<double> pi = {}) {
    MarkovMeasure P;
    P.alphabet_bound = alphabet_bound;
    P.support = std::move(support);
    P.order = order;
    P.kernel = std::move(kernel);
    if (P.support.empty()) throw std::domain_error("make_markov: empty support");
    for (std::size_t i = 0; i < P.support.size(); ++i) {
        if (P.support[i] < 1 || P.support[i] > alphabet_bound)
            throw std::domain_error("make_markov: support digit out of range");
        if (i > 0 && P.support[i] <= P.support[i - 1])
            throw std::domain_error("make_markov: support must be strictly ascending");
    }
    const std::uint64_t S = P.state_count();
    const std::uint32_t A = P.alphabet_size();
    if (P.kernel.size() != S * A) throw std::domain_error("make_markov: kernel size mismatch");
    for (std::uint64_t s = 0; s < S; ++s) {
        KahanSum row;
        for (std::uint32_t a = 0; a < A; ++a) {
            const double t = P.transition(s, a);
            if (t < 0.0 || !std::isfinite(t))
                throw std::domain_error("make_markov: kernel entries must be finite and >= 0");
            row.add(t);
        }
        if (std::abs(row.value() - 1.0) > 1e-12)
            throw std::domain_error("make_markov: kernel row " + std::to_string(s) +
                                    " does not sum to 1");
    }
    P.pi = pi.empty() ? detail::stationary_distribution(P) : std::move(pi);
    if (P.pi.size() != S) throw std::domain_error("make_markov: pi size mismatch");
    if (detail::stationarity_residual(P) > 1e-10)
        throw std::domain_error("make_markov: state distribution is not stationary");
    return P;
}

/// (p_1, ..., p_{N-1}, 1 - sum_{j<N} p_j): the digit marginals of the
/// N-truncated family, summing to 1 with the tail mass on digit N.
inline std::vector<double> truncate_frequencies(const FrequencyVector& freq, std::uint32_t N) {
    if (N < 1) throw std::domain_error("truncate_frequencies: N must be >= 1");
    std::vector<double> out(N, 0.0);
    KahanSum partial;
    for (std::uint32_t j = 1; j < N; ++j) {
        out[j - 1] = freq.mass(j);
        partial.add(out[j - 1]);
    }
    const double tail = 1.0 - partial.value();
    if (tail < -1e-12)
        throw std::domain_error("truncate_frequencies: masses below N already exceed 1");
    out[N - 1] = std::max(tail, 0.0);
    if (N == 1 && std::abs(freq.mass(1) - 1.0) > 1e-12)
        throw std::domain_error("truncate_frequencies: N = 1 requires p_1 = 1");
    return out;
}

/// Order-0 (Bernoulli) measure with the N-truncated digit marginals;
/// zero-mass digits are dropped from the alphabet.
inline MarkovMeasure bernoulli_measure(const FrequencyVector& freq, std::uint32_t N) {
    auto masses = truncate_frequencies(freq, N);
    std::vector<std::uint32_t> support;
    std::vector<double> row;
    for (std::uint32_t j = 1; j <= N; ++j) {
        if (masses[j - 1] > 0.0) {
            support.push_back(j);
            row.push_back(masses[j - 1]);
        }
    }
    if (support.empty()) throw std::domain_error("bernoulli_measure: truncation has zero mass");
    KahanSum total;
    for (double p : row) total.add(p);
    for (double& p : row) p /= total.value();
    return make_markov(N, std::move(support), 0, std::move(row), {1.0});
}

/// P(I(a_1, ..., a_n)). For n <= order this is the marginal of the
/// stationary state distribution; digits outside the support give 0.
inline double cylinder_probability(const MarkovMeasure& P, const CylinderWord& word) {
    if (word.empty()) throw std::domain_error("cylinder_probability: empty word");
    const std::uint32_t A = P.alphabet_size();
    std::vector<std::uint32_t> idx;
    idx.reserve(word.length());
    for (const auto& d : word.digits) {
        int i = P.digit_index(d);
        if (i < 0) return 0.0;
        idx.push_back(static_cast<std::uint32_t>(i));
    }
    const std::size_t n = idx.size();
    if (n < P.order) {
        // Marginal over the first n coordinates: states with the given
        // prefix form a contiguous code block.
        std::uint64_t block = 1;
        for (std::uint32_t i = 0; i < P.order - n; ++i) block *= A;
        std::uint64_t base = 0;
        for (std::size_t i = 0; i < n; ++i) base = base * A + idx[i];
        base *= block;
        KahanSum s;
        for (std::uint64_t off = 0; off < block; ++off) s.add(P.pi[base + off]);
        return s.value();
    }
    std::uint64_t state = 0;
    for (std::uint32_t i = 0; i < P.order; ++i) state = state * A + idx[i];
    double prob = P.order == 0 ? 1.0 : P.pi[state];
    for (std::size_t i = P.order; i < n; ++i) {
        prob *= P.transition(state, idx[i]);
        state = P.next_state(state, idx[i]);
    }
    return prob;
}

/// h_P = -sum_s pi(s) sum_a t(a|s) log t(a|s), in nats per digit.
inline double entropy_rate(const MarkovMeasure& P) {
    KahanSum h;
    const std::uint32_t A = P.alphabet_size();
    for (std::uint64_t s = 0; s < P.state_count(); ++s) {
        const double ps = P.order == 0 ? 1.0 : P.pi[s];
        if (ps <= 0.0) continue;
        for (std::uint32_t a = 0; a < A; ++a) h.add(ps * entropy_phi(P.transition(s, a)));
    }
    return h.value();
}

namespace detail {

/// Enumerate all depth-k cylinders over the support in lexicographic
/// order, visiting (digit indices, probability, p_k, q_k, q_{k-1}).
template <typename Visit>
void for_each_cylinder(const MarkovMeasure& P, std::size_t k, std::uint64_t budget, Visit&& visit) {
    if (k < 1) throw std::domain_error("for_each_cylinder: k must be >= 1");
    const std::uint32_t A = P.alphabet_size();
    double total = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        total *= A;
        if (total > double(budget))
            throw resource_error("cylinder enumeration exceeds the configured budget");
    }

    // Prefix sums of pi for O(1) marginals of short prefixes.
    std::vector<double> pi_prefix;
    if (P.order > 0) {
        pi_prefix.resize(P.state_count() + 1, 0.0);
        for (std::uint64_t s = 0; s < P.state_count(); ++s)
            pi_prefix[s + 1] = pi_prefix[s] + P.pi[s];
    }
    auto prefix_marginal = [&](std::uint64_t code, std::size_t depth) {
        std::uint64_t block = 1;
        for (std::uint32_t i = 0; i < P.order - depth; ++i) block *= A;
        return pi_prefix[(code + 1) * block] - pi_prefix[code * block];
    };

    std::vector<std::uint32_t> idx(k, 0);
    std::vector<double> prob(k + 1, 1.0);
    std::vector<std::uint64_t> state(k + 1, 0);
    std::vector<BigInt> ps(k + 1), qs(k + 1), ps_prev(k + 1), qs_prev(k + 1);
    ps[0] = 0; qs[0] = 1; ps_prev[0] = 1; qs_prev[0] = 0;

    auto recompute_level = [&](std::size_t d) {
        // Level d holds the word prefix of length d+1 ending in idx[d].
        const std::uint32_t a = idx[d];
        const std::size_t len = d + 1;
        if (len <= P.order) {
            const std::uint64_t code = state[d] * A + a;  // prefix code of length len
            prob[d + 1] = prefix_marginal(code, len);
            state[d + 1] = code;  // still a prefix code until len == order
        } else {
            prob[d + 1] = prob[d] * P.transition(state[d], a);
            state[d + 1] = P.next_state(state[d], a);
        }
        const BigInt digit(P.support[a]);
        ps[d + 1] = digit * ps[d] + ps_prev[d];
        qs[d + 1] = digit * qs[d] + qs_prev[d];
        ps_prev[d + 1] = ps[d];
        qs_prev[d + 1] = qs[d];
    };

    // Special case: prob of a prefix shorter than the order is a pi
    // marginal, but the ratio chain resumes once len reaches the order.
    // Handled by storing prefix codes in state[] while len <= order.
    for (std::size_t d = 0; d < k; ++d) recompute_level(d);
    while (true) {
        visit(static_cast<const std::vector<std::uint32_t>&>(idx), prob[k], ps[k], qs[k],
              qs_prev[k]);
        std::size_t d = k;
        while (d > 0 && idx[d - 1] + 1 == A) --d;
        if (d == 0) break;
        ++idx[d - 1];
        for (std::size_t i = d; i < k; ++i) idx[i] = 0;
        for (std::size_t i = d - 1; i < k; ++i) recompute_level(i);
    }
}

}  // namespace detail

/// Depth-k approximation of the Lyapunov functional:
/// -2 sum_u P(I(u)) log(p_k(u)/q_k(u)); strictly positive.
inline double lyapunov_functional(const MarkovMeasure& P, std::size_t k,
                                  std::uint64_t budget = 10'000'000) {
    KahanSum sum;
    detail::for_each_cylinder(P, k, budget,
                              [&](const std::vector<std::uint32_t>&, double prob, const BigInt& pk,
                                  const BigInt& qk, const BigInt&) {
                                  if (prob > 0.0) sum.add(prob * (log_big(pk) - log_big(qk)));
                              });
    return -2.0 * sum.value();
}

/// sum_u P(I(u)) log q_k(u).
inline double log_qk_moment(const MarkovMeasure& P, std::size_t k,
                            std::uint64_t budget = 10'000'000) {
    KahanSum sum;
    detail::for_each_cylinder(P, k, budget,
                              [&](const std::vector<std::uint32_t>&, double prob, const BigInt&,
                                  const BigInt& qk, const BigInt&) {
                                  if (prob > 0.0) sum.add(prob * log_big(qk));
                              });
    return sum.value();
}

/// Jensen slack [-sum_u P(u) log |I(u)|] - [-sum_u P(u) log P(u)] >= 0.
inline double jensen_gap(const MarkovMeasure& P, std::size_t k, std::uint64_t budget = 10'000'000) {
    KahanSum len_term, ent_term;
    detail::for_each_cylinder(
        P, k, budget,
        [&](const std::vector<std::uint32_t>&, double prob, const BigInt&, const BigInt& qk,
            const BigInt& qk_prev) {
            if (prob <= 0.0) return;
            len_term.add(prob * (log_big(qk) + log_big(qk + qk_prev)));  // -log|I(u)|
            ent_term.add(entropy_phi(prob));
        });
    return len_term.value() - ent_term.value();
}

/// The (k-1)-step measure determined by the perturbed k-cylinder values
/// p_eps(u) = (1-eps) P(I(u)) + eps/N^k over the full alphabet {1..N}.
/// Every cylinder becomes strictly positive; the kernel is rebuilt by
/// conditioning and the stationary distribution re-verified.
inline MarkovMeasure perturb(const MarkovMeasure& P, double eps, std::size_t k,
                             std::uint64_t budget = 10'000'000) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("perturb: eps must lie in (0,1)");
    if (k < 1) throw std::domain_error("perturb: k must be >= 1");
    const std::uint32_t N = P.alphabet_bound;
    double total = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        total *= N;
        if (total > double(budget)) throw resource_error("perturb: N^k exceeds the budget");
    }
    const auto n_cyl = static_cast<std::uint64_t>(total);
    const double uniform = eps / total;

    std::vector<double> p_eps(n_cyl);
    std::vector<BigInt> digits(k, 1);
    for (std::uint64_t code = 0;; ++code) {
        p_eps[code] = (1.0 - eps) * cylinder_probability(P, CylinderWord(digits)) + uniform;
        std::size_t d = k;
        while (d > 0 && digits[d - 1] == N) --d;
        if (d == 0) break;
        ++digits[d - 1];
        for (std::size_t i = d; i < k; ++i) digits[i] = 1;
    }

    const std::uint64_t S = n_cyl / N;  // states = (k-1)-prefixes
    std::vector<double> w_mass(S, 0.0);
    for (std::uint64_t s = 0; s < S; ++s)
        for (std::uint32_t a = 0; a < N; ++a) w_mass[s] += p_eps[s * N + a];
    std::vector<double> kernel(n_cyl);
    for (std::uint64_t s = 0; s < S; ++s)
        for (std::uint32_t a = 0; a < N; ++a) kernel[s * N + a] = p_eps[s * N + a] / w_mass[s];

    std::vector<std::uint32_t> support(N);
    for (std::uint32_t j = 0; j < N; ++j) support[j] = j + 1;
    // The (k-1)-prefix marginal is stationary by consistency of p_eps;
    // make_markov re-verifies it against the kernel.
    return make_markov(N, std::move(support), static_cast<std::uint32_t>(k) - 1,
                       std::move(kernel), std::move(w_mass));
}

}  // namespace cfdim
