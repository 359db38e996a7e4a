#pragma once

/**
 * @file optimizer.hpp
 * @brief The variational program: maximize the entropy/Lyapunov ratio over
 *        constrained multi-step Markov measures and assemble the final
 *        dimension estimate max{1/2, sup}.
 *
 * Solver layout (one cell per alphabet bound N and cylinder depth k):
 *   - outer Dinkelbach iteration on the ratio level theta;
 *   - inner problem: maximize [entropy rate + theta-weighted potential]
 *     subject to the digit-marginal constraints, solved by damped dual
 *     ascent on one multiplier per constrained digit;
 *   - each dual evaluation is a closed-form Gibbs maximization given by
 *     the Perron eigendata of the positive transfer matrix with weights
 *     exp(2 theta log(p_k/q_k)(u) + beta_{u_1}) over states support^{k-1}.
 *
 * The reported alpha is the finite-depth block ratio
 *   [-(1/k) sum p(u) log p(u)] / [-2 sum p(u) log(p_k(u)/q_k(u))]
 * evaluated at the maximizing measure; the entropy-rate ratio (the limit
 * flavor) is reported alongside in the diagnostics.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bigmath.hpp"
#include "frequency.hpp"
#include "markov.hpp"

namespace cfdim {

struct SolverOptions {
    double dual_damping = 0.5;
    double marginal_tol = 1e-10;    // dual ascent stop, infinity norm
    double dinkelbach_tol = 1e-12;  // on F(theta)/max(1, D)
    double power_tol = 1e-13;       // relative eigen residual
    int max_outer = 100;
    int max_dual = 500;
    int max_power = 10000;
    std::uint64_t cylinder_budget = 10'000'000;
};

struct VariationalProblem {
    FrequencyVector freq;
    std::uint32_t N = 2;
    std::size_t k = 1;
    SolverOptions options;
};

struct SolveDiagnostics {
    std::vector<double> theta_history;  // nondecreasing Dinkelbach levels
    int outer_iterations = 0;
    int dual_iterations_last = 0;
    double dual_residual = 0.0;         // final marginal mismatch, inf norm
    double feasibility_residual = 0.0;  // same, measured on the argmax
    double dinkelbach_residual = 0.0;   // inner max of [num - theta*den] at stop
    double eigen_residual = 0.0;
    double rate_ratio = 0.0;            // h_P / denominator at the argmax
    double block_entropy_per_k = 0.0;   // Eq(3.1) numerator at the argmax
    double denominator = 0.0;           // -2 sum p log(p_k/q_k) at the argmax
    bool converged = false;
};

struct AlphaResult {
    double alpha = 0.0;
    MarkovMeasure argmax;
    SolveDiagnostics diag;
};

namespace detail {

/// Per-cell precomputation: support digits and log(p_k/q_k) per cylinder.
struct CellData {
    std::vector<std::uint32_t> support;
    std::vector<double> target;  // prescribed marginals, indexed by support
    std::vector<double> c;       // log(p_k/q_k) per cylinder code (lex)
    std::uint32_t A = 0;
    std::uint64_t n_cyl = 0, n_states = 0;
    std::size_t k = 1;
};

inline CellData prepare_cell(const FrequencyVector& freq, std::uint32_t N, std::size_t k,
                             std::uint64_t budget) {
    if (k < 1) throw std::domain_error("solve_alpha: k must be >= 1");
    CellData cell;
    cell.k = k;
    auto masses = truncate_frequencies(freq, N);
    for (std::uint32_t j = 1; j <= N; ++j) {
        if (masses[j - 1] > 0.0) {
            cell.support.push_back(j);
            cell.target.push_back(masses[j - 1]);
        }
    }
    if (cell.support.empty())
        throw infeasible_error("solve_alpha: all truncated digit marginals vanish");
    cell.A = static_cast<std::uint32_t>(cell.support.size());
    double total = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        total *= cell.A;
        if (total > double(budget))
            throw resource_error("solve_alpha: support^k exceeds the cylinder budget");
    }
    cell.n_cyl = static_cast<std::uint64_t>(total);
    cell.n_states = cell.n_cyl / cell.A;

    cell.c.resize(cell.n_cyl);
    std::vector<std::uint32_t> idx(k, 0);
    std::vector<BigInt> ps(k + 1), qs(k + 1), ps_prev(k + 1), qs_prev(k + 1);
    ps[0] = 0; qs[0] = 1; ps_prev[0] = 1; qs_prev[0] = 0;
    auto level = [&](std::size_t d) {
        const BigInt digit(cell.support[idx[d]]);
        ps[d + 1] = digit * ps[d] + ps_prev[d];
        qs[d + 1] = digit * qs[d] + qs_prev[d];
        ps_prev[d + 1] = ps[d];
        qs_prev[d + 1] = qs[d];
    };
    for (std::size_t d = 0; d < k; ++d) level(d);
    for (std::uint64_t code = 0;; ++code) {
        cell.c[code] = log_big(ps[k]) - log_big(qs[k]);
        std::size_t d = k;
        while (d > 0 && idx[d - 1] + 1 == cell.A) --d;
        if (d == 0) break;
        ++idx[d - 1];
        for (std::size_t i = d; i < k; ++i) idx[i] = 0;
        for (std::size_t i = d - 1; i < k; ++i) level(i);
    }
    return cell;
}

/// Gibbs maximizer of [entropy rate + sum nu(u) f(u)] over stationary
/// chains on support^{k-1}, where f(u) = 2 theta c(u) + beta[u_1].
/// Output: edge kernel, state distribution, cylinder distribution, and
/// the pressure log lambda.
struct GibbsResult {
    std::vector<double> kernel;  // [state * A + a]
    std::vector<double> pi;      // [state]
    std::vector<double> nu;      // [cylinder code]
    double log_lambda = 0.0;
    double eigen_residual = 0.0;
    int power_iterations = 0;
};

inline GibbsResult gibbs_maximizer(const CellData& cell, double theta,
                                   const std::vector<double>& beta, const SolverOptions& opt,
                                   std::vector<double>* warm_r = nullptr,
                                   std::vector<double>* warm_l = nullptr) {
    const std::uint32_t A = cell.A;
    const std::uint64_t S = cell.n_states;
    const std::uint64_t first_block = cell.n_cyl / A;  // cylinders per leading digit

    // Weights w(s,a) = exp(f(s.a) - shift); the shift cancels in the
    // Gibbs measure and is restored in log lambda.
    std::vector<double> f(cell.n_cyl);
    double shift = -1e300;
    for (std::uint64_t u = 0; u < cell.n_cyl; ++u) {
        const auto lead = static_cast<std::uint32_t>(u / first_block);
        f[u] = 2.0 * theta * cell.c[u] + beta[lead];
        shift = std::max(shift, f[u]);
    }
    std::vector<double> w(cell.n_cyl);
    for (std::uint64_t u = 0; u < cell.n_cyl; ++u) w[u] = std::exp(f[u] - shift);

    auto next_state = [&](std::uint64_t s, std::uint32_t a) { return (s * A + a) % S; };

    std::vector<double> r = warm_r && !warm_r->empty() ? *warm_r
                                                       : std::vector<double>(S, 1.0 / double(S));
    std::vector<double> l = warm_l && !warm_l->empty() ? *warm_l
                                                       : std::vector<double>(S, 1.0 / double(S));
    std::vector<double> rn(S), ln(S);
    double lambda = 0.0, residual = 1.0;
    int iters = 0;
    for (; iters < opt.max_power; ++iters) {
        // Right vector: (M r)(s) = sum_a w(s.a) r(next(s,a)).
        double rsum = 0.0;
        for (std::uint64_t s = 0; s < S; ++s) {
            double acc = 0.0;
            for (std::uint32_t a = 0; a < A; ++a) acc += w[s * A + a] * r[next_state(s, a)];
            rn[s] = acc;
            rsum += acc;
        }
        // Left vector: (l M)(s') = sum over edges into s'.
        std::fill(ln.begin(), ln.end(), 0.0);
        for (std::uint64_t s = 0; s < S; ++s)
            for (std::uint32_t a = 0; a < A; ++a) ln[next_state(s, a)] += w[s * A + a] * l[s];
        double lsum = 0.0;
        for (double x : ln) lsum += x;

        lambda = rsum;  // r is L1-normalized at loop entry
        residual = 0.0;
        for (std::uint64_t s = 0; s < S; ++s)
            residual = std::max(residual, std::abs(rn[s] - lambda * r[s]));
        residual /= lambda;
        for (std::uint64_t s = 0; s < S; ++s) {
            r[s] = rn[s] / rsum;
            l[s] = ln[s] / lsum;
        }
        if (residual <= opt.power_tol) {
            ++iters;
            break;
        }
    }
    if (warm_r) *warm_r = r;
    if (warm_l) *warm_l = l;

    GibbsResult g;
    g.power_iterations = iters;
    g.eigen_residual = residual;
    g.log_lambda = std::log(lambda) + shift;

    // pi(s) = l(s) r(s) normalized; t(a|s) = w(s,a) r(next)/(lambda r(s)).
    g.pi.resize(S);
    double pisum = 0.0;
    for (std::uint64_t s = 0; s < S; ++s) {
        g.pi[s] = l[s] * r[s];
        pisum += g.pi[s];
    }
    for (auto& x : g.pi) x /= pisum;

    g.kernel.resize(cell.n_cyl);
    for (std::uint64_t s = 0; s < S; ++s) {
        double row = 0.0;
        for (std::uint32_t a = 0; a < A; ++a) {
            const double t = w[s * A + a] * r[next_state(s, a)] / (lambda * r[s]);
            g.kernel[s * A + a] = t;
            row += t;
        }
        for (std::uint32_t a = 0; a < A; ++a) g.kernel[s * A + a] /= row;
    }

    g.nu.resize(cell.n_cyl);
    for (std::uint64_t s = 0; s < S; ++s)
        for (std::uint32_t a = 0; a < A; ++a) g.nu[s * A + a] = g.pi[s] * g.kernel[s * A + a];
    return g;
}

inline std::vector<double> gibbs_digit_marginals(const CellData& cell, const GibbsResult& g) {
    const std::uint32_t A = cell.A;
    std::vector<double> m(A, 0.0);
    if (cell.n_states == 1) {
        for (std::uint32_t a = 0; a < A; ++a) m[a] = g.nu[a];
        return m;
    }
    const std::uint64_t lead_block = cell.n_states / A;
    for (std::uint64_t s = 0; s < cell.n_states; ++s)
        m[static_cast<std::uint32_t>(s / lead_block)] += g.pi[s];
    return m;
}

struct GibbsFunctionals {
    double entropy_rate = 0.0;
    double block_entropy = 0.0;  // H_k of the cylinder distribution
    double denominator = 0.0;    // -2 sum nu c
};

inline GibbsFunctionals evaluate_functionals(const CellData& cell, const GibbsResult& g) {
    GibbsFunctionals out;
    const std::uint32_t A = cell.A;
    KahanSum h, hk, den;
    for (std::uint64_t s = 0; s < cell.n_states; ++s) {
        const double ps = g.pi[s];
        if (ps <= 0.0) continue;
        for (std::uint32_t a = 0; a < A; ++a) h.add(ps * entropy_phi(g.kernel[s * A + a]));
    }
    for (std::uint64_t u = 0; u < cell.n_cyl; ++u) {
        hk.add(entropy_phi(g.nu[u]));
        den.add(g.nu[u] * cell.c[u]);
    }
    out.entropy_rate = h.value();
    out.block_entropy = hk.value();
    out.denominator = -2.0 * den.value();
    return out;
}

}  // namespace detail

/// Maximize the depth-k ratio over the N-truncated constrained Markov
/// family. Returns the maximized Eq-(3.1)-style block ratio, the
/// maximizing measure, and convergence diagnostics.
inline AlphaResult solve_alpha(const VariationalProblem& problem) {
    const auto& opt = problem.options;
    auto cell = detail::prepare_cell(problem.freq, problem.N, problem.k, opt.cylinder_budget);
    const std::uint32_t A = cell.A;
    const std::size_t k = cell.k;

    AlphaResult res;
    if (A == 1) {
        // Single feasible measure: the Dirac chain. Entropy is zero, so
        // the ratio is zero regardless of the denominator.
        std::vector<double> kernel(cell.n_states, 1.0);
        res.argmax = make_markov(problem.N, cell.support, static_cast<std::uint32_t>(k) - 1,
                                 std::move(kernel), std::vector<double>(cell.n_states, 1.0));
        res.alpha = 0.0;
        res.diag.theta_history = {0.0};
        res.diag.converged = true;
        res.diag.denominator = -2.0 * cell.c[0];
        return res;
    }

    // Dinkelbach start: the Bernoulli point with the target marginals is
    // feasible, so its ratio is a valid lower level.
    double theta;
    {
        KahanSum h1, den;
        for (std::uint32_t a = 0; a < A; ++a) h1.add(entropy_phi(cell.target[a]));
        std::vector<std::uint32_t> idx(k, 0);
        for (std::uint64_t u = 0; u < cell.n_cyl; ++u) {
            double prob = 1.0;
            std::uint64_t rest = u;
            for (std::size_t i = 0; i < k; ++i) {
                prob *= cell.target[rest % A];
                rest /= A;
            }
            den.add(prob * cell.c[u]);
        }
        theta = h1.value() / (-2.0 * den.value());
    }

    std::vector<double> beta(A, 0.0), warm_r, warm_l;
    detail::GibbsResult gibbs;
    detail::GibbsFunctionals fn;
    auto& diag = res.diag;

    bool done = false;
    for (int outer = 0; outer < opt.max_outer && !done; ++outer) {
        ++diag.outer_iterations;
        // Inner: dual ascent matching the digit marginals at level theta.
        double residual = 1.0;
        int dual_it = 0;
        for (; dual_it < opt.max_dual; ++dual_it) {
            gibbs = detail::gibbs_maximizer(cell, theta, beta, opt, &warm_r, &warm_l);
            auto marg = detail::gibbs_digit_marginals(cell, gibbs);
            residual = 0.0;
            for (std::uint32_t a = 0; a < A; ++a)
                residual = std::max(residual, std::abs(marg[a] - cell.target[a]));
            if (residual <= opt.marginal_tol) break;
            for (std::uint32_t a = 0; a < A; ++a)
                beta[a] += opt.dual_damping * (std::log(cell.target[a]) - std::log(marg[a]));
            const double gauge = beta[A - 1];
            for (auto& b : beta) b -= gauge;
        }
        diag.dual_iterations_last = dual_it;
        diag.dual_residual = residual;
        if (residual > opt.marginal_tol)
            throw convergence_error("solve_alpha: dual ascent did not match the marginals", theta);

        fn = detail::evaluate_functionals(cell, gibbs);
        diag.theta_history.push_back(theta);
        const double F = fn.entropy_rate - theta * fn.denominator;
        if (F <= opt.dinkelbach_tol * std::max(1.0, fn.denominator)) {
            diag.dinkelbach_residual = F;
            diag.converged = true;
            done = true;
        } else {
            theta = std::max(theta, fn.entropy_rate / fn.denominator);
        }
    }
    if (!done)
        throw convergence_error("solve_alpha: Dinkelbach iteration cap reached", theta);

    res.argmax = make_markov(problem.N, cell.support, static_cast<std::uint32_t>(k) - 1,
                             gibbs.kernel, gibbs.pi);
    diag.eigen_residual = gibbs.eigen_residual;
    diag.rate_ratio = fn.entropy_rate / fn.denominator;
    diag.block_entropy_per_k = fn.block_entropy / double(k);
    diag.denominator = fn.denominator;
    {
        auto marg = res.argmax.digit_marginals();
        double feas = 0.0;
        for (std::uint32_t a = 0; a < A; ++a)
            feas = std::max(feas, std::abs(marg[a] - cell.target[a]));
        diag.feasibility_residual = feas;
    }
    res.alpha = diag.block_entropy_per_k / diag.denominator;
    return res;
}

/// Tail sum sum_{j > N} 8/(j+1)^(2 gamma) from the covering argument.
/// The upper-bound machinery needs this below 1; the alphabet bound N is
/// exposed freely and callers inspect the sum for their chosen gamma.
inline double covering_tail_sum(std::uint32_t N, double gamma) {
    if (!(gamma > 0.5)) throw std::domain_error("covering_tail_sum: gamma must exceed 1/2");
    return 8.0 * detail::power_log_series_sum(2.0 * gamma, 0.0, N + 2);
}

// ---------------------------------------------------------------------------
// Divergence diagnostic and the dimension table.

struct DivergenceOptions {
    std::vector<std::uint32_t> N_trend{10, 100, 1000};
    std::size_t k = 1;
    double min_increment = 0.05;   // below this the trend counts as flat
    double flatten_ratio = 0.4;    // last/first increment ratio threshold
};

struct DivergenceReport {
    std::vector<std::pair<std::uint32_t, double>> moment_trend;  // (N, 2 sum p log q_k)
    std::vector<std::pair<std::uint32_t, double>> entropy_ratio; // (N, truncated Lemma-3.2 ratio)
    bool divergent = false;
};

/// Trend of the log-denominator moment at the Bernoulli feasible point
/// for increasing N; flags divergence when the trend keeps growing on a
/// log-N grid without flattening.
inline DivergenceReport divergence_diagnostic(const FrequencyVector& freq,
                                              const DivergenceOptions& opt = {}) {
    DivergenceReport rep;
    for (std::uint32_t N : opt.N_trend) {
        auto bern = bernoulli_measure(freq, N);
        const double moment = 2.0 * log_qk_moment(bern, opt.k);
        KahanSum ent;
        const auto marg = bern.digit_marginals();
        for (double p : marg) ent.add(entropy_phi(p));
        rep.moment_trend.emplace_back(N, moment);
        rep.entropy_ratio.emplace_back(N, moment > 0.0 ? ent.value() * double(opt.k) / moment : 0.0);
    }
    if (rep.moment_trend.size() >= 2) {
        std::vector<double> inc;
        for (std::size_t i = 1; i < rep.moment_trend.size(); ++i)
            inc.push_back(rep.moment_trend[i].second - rep.moment_trend[i - 1].second);
        bool growing = true;
        for (double d : inc) growing = growing && d > opt.min_increment;
        const bool flattening = inc.back() < opt.flatten_ratio * inc.front();
        rep.divergent = growing && !flattening;
    }
    return rep;
}

enum class CellStatus { ok, infeasible, budget, no_convergence, error };

struct DimensionCell {
    std::uint32_t N = 0;
    std::size_t k = 1;
    CellStatus status = CellStatus::ok;
    double alpha = 0.0;
    double rate_ratio = 0.0;
    int theta_iterations = 0;
    double dual_residual = 0.0;
    double feasibility_residual = 0.0;
    double wall_seconds = 0.0;
    std::string message;
};

struct DimensionEstimate {
    double value = 0.5;
    double sup_term = 0.0;
    bool divergence_flag = false;
    std::vector<DimensionCell> cells;
    DivergenceReport divergence;
};

struct DimensionOptions {
    SolverOptions solver;
    DivergenceOptions divergence;
    unsigned jobs = 1;
};

/// Evaluate alpha over the (N, k) grid, take the running supremum, and
/// clamp to 1/2 in the divergent-moment regime. Cell failures leave
/// holes, not a global failure.
inline DimensionEstimate dimension(const FrequencyVector& freq,
                                   const std::vector<std::uint32_t>& N_list,
                                   const std::vector<std::size_t>& k_list,
                                   const DimensionOptions& options = {}) {
    if (N_list.empty() || k_list.empty())
        throw std::domain_error("dimension: N_list and k_list must be nonempty");
    DimensionEstimate est;
    est.cells.resize(N_list.size() * k_list.size());

    auto run_cell = [&](std::size_t ci) {
        auto& cellout = est.cells[ci];
        cellout.N = N_list[ci / k_list.size()];
        cellout.k = k_list[ci % k_list.size()];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            VariationalProblem prob{freq, cellout.N, cellout.k, options.solver};
            auto r = solve_alpha(prob);
            cellout.alpha = r.alpha;
            cellout.rate_ratio = r.diag.rate_ratio;
            cellout.theta_iterations = r.diag.outer_iterations;
            cellout.dual_residual = r.diag.dual_residual;
            cellout.feasibility_residual = r.diag.feasibility_residual;
            cellout.status = CellStatus::ok;
        } catch (const infeasible_error& e) {
            cellout.status = CellStatus::infeasible;
            cellout.message = e.what();
        } catch (const resource_error& e) {
            cellout.status = CellStatus::budget;
            cellout.message = e.what();
        } catch (const convergence_error& e) {
            cellout.status = CellStatus::no_convergence;
            cellout.message = e.what();
        } catch (const std::exception& e) {
            cellout.status = CellStatus::error;
            cellout.message = e.what();
        }
        cellout.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    const std::size_t total = est.cells.size();
    if (options.jobs <= 1) {
        for (std::size_t i = 0; i < total; ++i) run_cell(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t stride = options.jobs;
        for (unsigned t = 0; t < options.jobs; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < total; i += stride) run_cell(i);
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& c : est.cells)
        if (c.status == CellStatus::ok) est.sup_term = std::max(est.sup_term, c.alpha);

    est.divergence = divergence_diagnostic(freq, options.divergence);
    est.divergence_flag = est.divergence.divergent;
    est.value = est.divergence_flag ? 0.5 : std::max(0.5, est.sup_term);
    return est;
}

// ---------------------------------------------------------------------------
// Brute-force oracle for tiny instances (test support).

/// Grid maximum of the depth-k block ratio over stationary chains meeting
/// the digit-marginal constraints; order-1 chains are parametrized by
/// their edge measure (a transportation polytope), gridded at the given
/// resolution, then refined by shrinking compass search.
inline double grid_oracle(const FrequencyVector& freq, std::uint32_t N, std::size_t k,
                          double resolution, std::uint64_t budget = 50'000'000) {
    if (N > 3 || k > 2) throw resource_error("grid_oracle: only N <= 3 and k <= 2 are enumerable");
    if (resolution <= 0.0 || resolution > 0.5)
        throw std::domain_error("grid_oracle: resolution must lie in (0, 0.5]");
    auto cell = detail::prepare_cell(freq, N, k, budget);
    const std::uint32_t A = cell.A;
    if (A == 1) return 0.0;

    // Depth-k block ratio of an edge measure nu on support x support.
    auto ratio_of_edge = [&](const std::vector<double>& nu) {
        KahanSum hk, den;
        if (k == 1) {
            for (std::uint32_t a = 0; a < A; ++a) {
                double row = 0.0;
                for (std::uint32_t b = 0; b < A; ++b) row += nu[a * A + b];
                hk.add(entropy_phi(row));
                den.add(row * cell.c[a]);
            }
        } else {
            for (std::uint64_t u = 0; u < cell.n_cyl; ++u) {
                hk.add(entropy_phi(nu[u]));
                den.add(nu[u] * cell.c[u]);
            }
        }
        const double d = -2.0 * den.value();
        if (d <= 0.0) return 0.0;
        return hk.value() / double(k) / d;
    };

    // Free block: the (A-1) x (A-1) upper-left corner of the edge matrix.
    const std::uint32_t F = (A - 1) * (A - 1);
    auto build_edge = [&](const std::vector<double>& free_vals, std::vector<double>& nu) {
        for (std::uint32_t i = 0; i + 1 < A; ++i)
            for (std::uint32_t j = 0; j + 1 < A; ++j)
                nu[i * A + j] = free_vals[i * (A - 1) + j];
        for (std::uint32_t i = 0; i + 1 < A; ++i) {
            double row = 0.0;
            for (std::uint32_t j = 0; j + 1 < A; ++j) row += nu[i * A + j];
            nu[i * A + (A - 1)] = cell.target[i] - row;
        }
        for (std::uint32_t j = 0; j + 1 < A; ++j) {
            double col = 0.0;
            for (std::uint32_t i = 0; i + 1 < A; ++i) col += nu[i * A + j];
            nu[(A - 1) * A + j] = cell.target[j] - col;
        }
        double rest = 0.0;
        for (std::uint32_t j = 0; j + 1 < A; ++j) rest += nu[(A - 1) * A + j];
        nu[(A - 1) * A + (A - 1)] = cell.target[A - 1] - rest;
        for (std::uint32_t t = 0; t < A * A; ++t)
            if (nu[t] < -1e-12) return false;
        for (auto& x : nu)
            if (x < 0.0) x = 0.0;
        return true;
    };

    std::vector<double> free_vals(F, 0.0), nu(A * A, 0.0), best_free(F, 0.0);
    double best = -1.0;
    std::vector<std::uint32_t> steps_per_dim(F);
    double grid_points = 1.0;
    for (std::uint32_t d = 0; d < F; ++d) {
        steps_per_dim[d] = static_cast<std::uint32_t>(1.0 / resolution) + 1;
        grid_points *= steps_per_dim[d];
        if (grid_points > double(budget))
            throw resource_error("grid_oracle: grid exceeds the evaluation budget");
    }
    std::vector<std::uint32_t> pos(F, 0);
    while (true) {
        for (std::uint32_t d = 0; d < F; ++d)
            free_vals[d] = std::min(1.0, pos[d] * resolution);
        if (build_edge(free_vals, nu)) {
            const double v = ratio_of_edge(nu);
            if (v > best) {
                best = v;
                best_free = free_vals;
            }
        }
        std::uint32_t d = F;
        while (d > 0 && pos[d - 1] + 1 == steps_per_dim[d - 1]) --d;
        if (d == 0) break;
        ++pos[d - 1];
        for (std::uint32_t i = d; i < F; ++i) pos[i] = 0;
    }
    if (best < 0.0) throw infeasible_error("grid_oracle: no feasible grid point");

    // Local refinement: shrinking compass search around the best point.
    double step = resolution;
    free_vals = best_free;
    long evals_left = 2'000'000;
    while (step > 1e-9 && evals_left > 0) {
        bool improved = false;
        for (std::uint32_t d = 0; d < F; ++d) {
            for (double dir : {+1.0, -1.0}) {
                auto cand = free_vals;
                cand[d] += dir * step;
                if (cand[d] < 0.0 || cand[d] > 1.0) continue;
                if (!build_edge(cand, nu)) continue;
                --evals_left;
                const double v = ratio_of_edge(nu);
                if (v > best) {
                    best = v;
                    free_vals = cand;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

}  // namespace cfdim
