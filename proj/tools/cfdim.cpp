// cfdim: continued-fraction digit-frequency dimension toolkit.
//
// Subcommands: analyze, dimension, verify, sample. Every flag has a
// config-file equivalent (JSON, keyed by the long flag name); flags
// override the file. All floating-point output uses 12 significant
// digits. Exit codes: 0 success, 1 usage/parse/other, 2 infeasible,
// 3 budget exceeded, 4 non-convergence.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <cfdim/constructions.hpp>
#include <cfdim/optimizer.hpp>
#include <cfdim/verify.hpp>
#include <cfdim/word_stats.hpp>

using nlohmann::json;
using namespace cfdim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBudget = 3;
constexpr int kExitNoConvergence = 4;

std::string g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Exact rational from "p/q" or a plain/decimal literal; reports the
// offending position on malformed input.
Rational parse_rational(const std::string& s) {
    auto fail = [&](std::size_t pos, const std::string& what) -> Rational {
        throw std::invalid_argument("parse error at position " + std::to_string(pos) + ": " +
                                    what + " in \"" + s + "\"");
    };
    std::size_t i = 0;
    auto read_digits = [&]() {
        const std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == start) fail(i, "expected digits");
        return s.substr(start, i - start);
    };
    const std::string ipart = read_digits();
    if (i < s.size() && s[i] == '/') {
        ++i;
        const std::string den = read_digits();
        if (i != s.size()) fail(i, "trailing characters");
        if (BigInt(den) == 0) fail(i, "zero denominator");
        return Rational(BigInt(ipart), BigInt(den));
    }
    if (i < s.size() && s[i] == '.') {
        ++i;
        const std::string fpart = read_digits();
        if (i != s.size()) fail(i, "trailing characters");
        BigInt scale = 1;
        for (std::size_t d = 0; d < fpart.size(); ++d) scale *= 10;
        return Rational(BigInt(ipart) * scale + BigInt(fpart), scale);
    }
    if (i != s.size()) fail(i, "unexpected character");
    return Rational(BigInt(ipart));
}

std::vector<std::uint64_t> parse_list_u64(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon != std::string::npos) {
            const auto lo = std::stoull(item.substr(0, colon));
            const auto hi = std::stoull(item.substr(colon + 1));
            for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(std::stoull(item));
        }
    }
    if (out.empty()) throw std::invalid_argument("empty integer list: \"" + s + "\"");
    return out;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json js;
    in >> js;
    return js;
}

// Config fallback: use the JSON value when the flag was not given.
template <typename T>
void fallback(const CLI::Option* opt, const json& cfg, const char* key, T& var) {
    if (opt->count() == 0 && cfg.contains(key)) var = cfg.at(key).get<T>();
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    return file;
}

const char* status_name(CellStatus s) {
    switch (s) {
        case CellStatus::ok: return "ok";
        case CellStatus::infeasible: return "infeasible";
        case CellStatus::budget: return "budget";
        case CellStatus::no_convergence: return "no_convergence";
        default: return "error";
    }
}

// --- analyze ----------------------------------------------------------

int cmd_analyze(const std::string& input, const std::string& digits_csv, std::size_t depth,
                const std::string& ranks_csv, const std::string& format,
                const std::string& out_path) {
    CylinderWord word;
    if (!digits_csv.empty()) {
        std::vector<BigInt> d;
        for (auto v : parse_list_u64(digits_csv)) d.emplace_back(v);
        word = CylinderWord(std::move(d));
    } else if (!input.empty()) {
        word = cf_expand(parse_rational(input), depth);
    } else {
        throw std::invalid_argument("analyze needs a number argument or --digits");
    }
    if (word.empty()) throw std::invalid_argument("empty expansion");

    std::vector<std::uint64_t> ranks;
    if (ranks_csv.empty()) {
        for (std::uint64_t r = 1; r <= word.length(); ++r) ranks.push_back(r);
    } else {
        ranks = parse_list_u64(ranks_csv);
        for (auto r : ranks)
            if (r < 1 || r > word.length())
                throw std::invalid_argument("rank out of range: " + std::to_string(r));
    }

    auto cs = convergents(word);
    std::map<std::string, std::pair<std::uint64_t, double>> taus;
    {
        std::map<BigInt, std::uint64_t> counts;
        for (const auto& d : word.digits) ++counts[d];
        for (const auto& [d, c] : counts)
            taus[d.str()] = {c, double(c) / double(word.length())};
    }

    std::ofstream file;
    auto& os = open_out(file, out_path);
    if (format == "json") {
        json js;
        js["digits"] = json::array();
        for (const auto& d : word.digits) js["digits"].push_back(d.str());
        js["frequencies"] = json::object();
        for (const auto& [d, t] : taus)
            js["frequencies"][d] = {{"count", t.first}, {"ratio", t.second}};
        js["ranks"] = json::array();
        for (auto r : ranks) {
            const auto& c = cs[r - 1];
            const Rational len = interval_length(
                CylinderWord(std::vector<BigInt>(word.digits.begin(), word.digits.begin() + r)));
            js["ranks"].push_back({{"rank", r},
                                   {"p", c.p.str()},
                                   {"q", c.q.str()},
                                   {"length", numerator(len).str() + "/" + denominator(len).str()},
                                   {"length_approx", len.convert_to<double>()}});
        }
        os << js.dump(2) << "\n";
    } else {
        os << "rank,digit,p,q,length\n";
        for (auto r : ranks) {
            const auto& c = cs[r - 1];
            const Rational len = interval_length(
                CylinderWord(std::vector<BigInt>(word.digits.begin(), word.digits.begin() + r)));
            os << r << ',' << word.digits[r - 1].str() << ',' << c.p.str() << ',' << c.q.str()
               << ',' << g12(len.convert_to<double>()) << "\n";
        }
    }
    for (const auto& [d, t] : taus)
        std::cerr << "tau[" << d << "] = " << t.first << " (" << g12(t.second) << ")\n";
    return kExitOk;
}

// --- dimension ---------------------------------------------------------

int cmd_dimension(const FrequencyVector& freq, const std::vector<std::uint32_t>& N_list,
                  const std::vector<std::size_t>& k_list, const DimensionOptions& options,
                  bool timings, const std::string& format, const std::string& out_path) {
    // Upfront dense-budget check over the declared alphabet bound.
    for (auto N : N_list)
        for (auto k : k_list) {
            double cells = 1.0;
            for (std::size_t i = 0; i < k; ++i) cells *= double(N);
            if (cells > double(options.solver.cylinder_budget)) {
                std::cerr << "rejected: N=" << N << " k=" << k
                          << " exceeds the cylinder budget\n";
                return kExitBudget;
            }
        }

    auto est = dimension(freq, N_list, k_list, options);

    std::ofstream file;
    auto& os = open_out(file, out_path);
    if (format == "json") {
        json js;
        js["value"] = est.value;
        js["sup_term"] = est.sup_term;
        js["divergence_flag"] = est.divergence_flag;
        js["cells"] = json::array();
        for (const auto& c : est.cells) {
            js["cells"].push_back({{"N", c.N},
                                   {"k", c.k},
                                   {"status", status_name(c.status)},
                                   {"alpha", c.alpha},
                                   {"rate_ratio", c.rate_ratio},
                                   {"theta_iterations", c.theta_iterations},
                                   {"dual_residual", c.dual_residual},
                                   {"feasibility_residual", c.feasibility_residual},
                                   {"divergence_flag", est.divergence_flag},
                                   {"wall_seconds", timings ? c.wall_seconds : 0.0},
                                   {"message", c.message}});
        }
        js["divergence_trend"] = json::array();
        for (auto [N, v] : est.divergence.moment_trend)
            js["divergence_trend"].push_back({{"N", N}, {"moment", v}});
        os << js.dump(2) << "\n";
    } else {
        os << "N,k,status,alpha,theta_iterations,dual_residual,feasibility_residual,"
              "divergence_flag,wall_seconds\n";
        for (const auto& c : est.cells) {
            os << c.N << ',' << c.k << ',' << status_name(c.status) << ',' << g12(c.alpha) << ','
               << c.theta_iterations << ',' << g12(c.dual_residual) << ','
               << g12(c.feasibility_residual) << ',' << (est.divergence_flag ? 1 : 0) << ','
               << g12(timings ? c.wall_seconds : 0.0) << "\n";
        }
        os << "# value = " << g12(est.value) << "\n";
        os << "# sup_term = " << g12(est.sup_term) << "\n";
        os << "# divergence_flag = " << (est.divergence_flag ? 1 : 0) << "\n";
    }
    std::cerr << "value = " << g12(est.value) << " (sup_term = " << g12(est.sup_term)
              << ", divergence_flag = " << (est.divergence_flag ? 1 : 0) << ")\n";

    bool any_ok = false;
    for (const auto& c : est.cells) any_ok = any_ok || c.status == CellStatus::ok;
    if (any_ok) return kExitOk;
    for (const auto& c : est.cells) {
        if (c.status == CellStatus::infeasible) return kExitInfeasible;
        if (c.status == CellStatus::budget) return kExitBudget;
        if (c.status == CellStatus::no_convergence) return kExitNoConvergence;
    }
    return kExitError;
}

// --- verify ------------------------------------------------------------

int cmd_verify(const std::string& suite, const VerifyOptions& opt, const std::string& format,
               const std::string& out_path) {
    auto reports = verify_suites(suite, opt);
    std::ofstream file;
    auto& os = open_out(file, out_path);
    bool all_pass = true;
    if (format == "json") {
        json js = json::array();
        for (const auto& r : reports) {
            all_pass = all_pass && r.passed();
            js.push_back({{"suite", r.suite},
                          {"trials", r.trials},
                          {"failures", r.failures},
                          {"counterexamples", r.counterexamples},
                          {"seconds", r.seconds}});
        }
        os << js.dump(2) << "\n";
    } else {
        os << "suite,trials,failures,seconds\n";
        for (const auto& r : reports) {
            all_pass = all_pass && r.passed();
            os << r.suite << ',' << r.trials << ',' << r.failures << ',' << g12(r.seconds)
               << "\n";
            for (const auto& ce : r.counterexamples) os << "# counterexample: " << ce << "\n";
        }
    }
    for (const auto& r : reports)
        std::cerr << "suite " << r.suite << ": trials=" << r.trials
                  << " failures=" << r.failures << " (" << g12(r.seconds) << " s)\n";
    return all_pass ? kExitOk : kExitError;
}

// --- sample ------------------------------------------------------------

CylinderWord build_z(const std::string& z_digits, const std::string& z_freq_path,
                     std::uint64_t z_seed, std::size_t depth) {
    if (!z_digits.empty()) {
        std::vector<BigInt> d;
        for (auto v : parse_list_u64(z_digits)) d.emplace_back(v);
        return CylinderWord(std::move(d));
    }
    if (!z_freq_path.empty()) {
        auto zf = FrequencyVector::load(z_freq_path);
        return seed_point(zf, GrowthSequence::identity(), depth, z_seed);
    }
    return CylinderWord(std::vector<BigInt>(depth, BigInt(1)));
}

int cmd_sample(const std::string& mode, const std::string& freq_path, std::size_t n, double b,
               const std::string& depths_csv, std::uint64_t seed, std::uint64_t count,
               const std::string& z_digits, const std::string& z_freq_path, std::uint64_t z_seed,
               const std::string& out_path) {
    std::ofstream file;
    auto& os = open_out(file, out_path);

    if (mode == "seed") {
        if (freq_path.empty()) throw std::invalid_argument("sample --mode seed needs --freq");
        auto freq = FrequencyVector::load(freq_path);
        auto growth = GrowthSequence::identity();
        for (std::uint64_t c = 0; c < count; ++c) {
            auto word = seed_point(freq, growth, n, seed + c);
            for (std::size_t i = 0; i < word.length(); ++i)
                os << (i ? "," : "") << word.digits[i].str();
            os << "\n";
            std::map<BigInt, std::uint64_t> counts;
            for (const auto& d : word.digits) ++counts[d];
            std::cerr << "word " << c << ":";
            int shown = 0;
            for (const auto& [d, cnt] : counts) {
                if (++shown > 6) { std::cerr << " ..."; break; }
                std::cerr << " tau[" << d.str() << "]=" << g12(double(cnt) / double(n));
            }
            std::cerr << "\n";
        }
        return kExitOk;
    }

    if (mode == "fz") {
        auto z = build_z(z_digits, z_freq_path, z_seed, n);
        FzParameters params(std::move(z), b, n);
        for (std::uint64_t c = 0; c < count; ++c) {
            auto word = fz_point(params, n, seed + c);
            for (std::size_t i = 0; i < word.length(); ++i)
                os << (i ? "," : "") << word.digits[i].str();
            os << "\n";
        }
        return kExitOk;
    }

    if (mode == "profile") {
        auto depths = parse_list_u64(depths_csv.empty() ? "4:100" : depths_csv);
        const std::size_t need = *std::max_element(depths.begin(), depths.end()) + 1;
        const std::size_t len = std::max(n, need);
        auto z = build_z(z_digits, z_freq_path, z_seed, len);
        FzParameters params(std::move(z), b, len);
        auto word = fz_point(params, len, seed);
        auto prof = local_dimension_profile(word, b, depths);
        os << "m,n,log_mass,log_length,ratio\n";
        for (const auto& pt : prof.points)
            os << pt.m << ',' << pt.n << ',' << g12(pt.log_mass) << ',' << g12(pt.log_length)
               << ',' << g12(pt.ratio) << "\n";
        if (!prof.verified)
            std::cerr << "warning: word does not match the b-ranges at square positions; "
                         "ratios reported unverified\n";
        return kExitOk;
    }

    throw std::invalid_argument("unknown sample mode \"" + mode + "\"");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continued-fraction digit-frequency dimension toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv";
    std::uint64_t seed = 1;
    unsigned jobs = 1;

    auto add_shared = [&](CLI::App* sub) {
        struct Shared {
            CLI::Option *config, *seed, *out, *format, *jobs;
        } sh;
        sh.config = sub->add_option("--config", config_path, "JSON config file");
        sh.seed = sub->add_option("--seed", seed, "RNG seed");
        sh.out = sub->add_option("--out", out_path, "output path (default stdout)");
        sh.format = sub->add_option("--format", format, "csv|json")
                        ->check(CLI::IsMember({"csv", "json"}));
        sh.jobs = sub->add_option("--jobs", jobs, "parallel grid cells");
        return sh;
    };

    // analyze
    auto* analyze = app.add_subcommand("analyze", "digit statistics of a number or word");
    std::string an_input, an_digits, an_ranks;
    std::size_t an_depth = 64;
    analyze->add_option("number", an_input, "rational like 3/7 or decimal like 0.625");
    auto* an_digits_opt = analyze->add_option("--digits", an_digits, "explicit digit list");
    auto* an_depth_opt = analyze->add_option("--depth", an_depth, "expansion depth");
    auto* an_ranks_opt = analyze->add_option("--ranks", an_ranks, "ranks to report");
    auto an_shared = add_shared(analyze);

    // dimension
    auto* dim = app.add_subcommand("dimension", "evaluate the (N,k) table for a frequency vector");
    std::string dim_freq, dim_N = "5,10,20", dim_k = "1,2";
    DimensionOptions dim_opt;
    bool no_timings = false;
    auto* dim_freq_opt = dim->add_option("--freq", dim_freq, "frequency vector JSON");
    auto* dim_N_opt = dim->add_option("--N", dim_N, "alphabet bounds, e.g. 5,10,20");
    auto* dim_k_opt = dim->add_option("--k", dim_k, "cylinder depths, e.g. 1,2");
    auto* dim_budget_opt =
        dim->add_option("--budget", dim_opt.solver.cylinder_budget, "dense cylinder budget");
    dim->add_option("--max-outer", dim_opt.solver.max_outer, "Dinkelbach iteration cap");
    dim->add_option("--max-dual", dim_opt.solver.max_dual, "dual ascent cap");
    dim->add_option("--max-power", dim_opt.solver.max_power, "power iteration cap");
    dim->add_option("--damping", dim_opt.solver.dual_damping, "dual ascent damping");
    dim->add_option("--marginal-tol", dim_opt.solver.marginal_tol, "marginal matching tolerance");
    dim->add_flag("--no-timings", no_timings, "zero the wall-time column for reproducible files");
    auto dim_shared = add_shared(dim);

    // verify
    auto* ver = app.add_subcommand("verify", "run the lemma property suites");
    std::string ver_suite = "all";
    VerifyOptions ver_opt;
    auto* ver_suite_opt =
        ver->add_option("--suite", ver_suite, "2.1|2.2|2.3|2.4|2.5|2.6|2.7|3.1|all");
    auto* ver_trials_opt = ver->add_option("--trials", ver_opt.trials, "randomized trials");
    auto* ver_dmax_opt = ver->add_option("--digit-max", ver_opt.digit_max, "digit bound");
    auto* ver_lmax_opt = ver->add_option("--len-max", ver_opt.len_max, "length bound");
    auto ver_shared = add_shared(ver);

    // sample
    auto* smp = app.add_subcommand("sample", "seed-point words, F_z(b) words, profiles");
    std::string smp_mode = "seed", smp_freq, smp_depths, smp_zdigits, smp_zfreq;
    std::size_t smp_n = 1000;
    double smp_b = 0.0;
    std::uint64_t smp_count = 1, smp_zseed = 1;
    auto* smp_mode_opt = smp->add_option("--mode", smp_mode, "seed|fz|profile")
                             ->check(CLI::IsMember({"seed", "fz", "profile"}));
    auto* smp_freq_opt = smp->add_option("--freq", smp_freq, "frequency vector JSON");
    auto* smp_n_opt = smp->add_option("--n", smp_n, "word length");
    auto* smp_b_opt = smp->add_option("--b", smp_b, "F_z(b) base, > 1");
    auto* smp_depths_opt = smp->add_option("--depths", smp_depths, "profile depths, e.g. 4:100");
    auto* smp_count_opt = smp->add_option("--count", smp_count, "number of words");
    smp->add_option("--z-digits", smp_zdigits, "explicit seed word digits");
    smp->add_option("--z-freq", smp_zfreq, "sample the seed word from this law");
    smp->add_option("--z-seed", smp_zseed, "seed for the seed-word sampler");
    auto smp_shared = add_shared(smp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*analyze) {
            const json cfg = load_config(config_path);
            fallback(an_digits_opt, cfg, "digits", an_digits);
            fallback(an_depth_opt, cfg, "depth", an_depth);
            fallback(an_ranks_opt, cfg, "ranks", an_ranks);
            fallback(an_shared.format, cfg, "format", format);
            fallback(an_shared.out, cfg, "out", out_path);
            if (an_input.empty() && cfg.contains("number"))
                an_input = cfg.at("number").get<std::string>();
            return cmd_analyze(an_input, an_digits, an_depth, an_ranks, format, out_path);
        }
        if (*dim) {
            const json cfg = load_config(config_path);
            fallback(dim_freq_opt, cfg, "freq", dim_freq);
            fallback(dim_shared.format, cfg, "format", format);
            fallback(dim_shared.out, cfg, "out", out_path);
            fallback(dim_shared.jobs, cfg, "jobs", jobs);
            fallback(dim_budget_opt, cfg, "budget", dim_opt.solver.cylinder_budget);
            std::vector<std::uint32_t> N_list;
            std::vector<std::size_t> k_list;
            if (dim_N_opt->count() == 0 && cfg.contains("N")) {
                for (auto v : cfg.at("N")) N_list.push_back(v.get<std::uint32_t>());
            } else {
                for (auto v : parse_list_u64(dim_N)) N_list.push_back(std::uint32_t(v));
            }
            if (dim_k_opt->count() == 0 && cfg.contains("k")) {
                for (auto v : cfg.at("k")) k_list.push_back(v.get<std::size_t>());
            } else {
                for (auto v : parse_list_u64(dim_k)) k_list.push_back(std::size_t(v));
            }
            if (dim_freq.empty()) throw std::invalid_argument("dimension needs --freq");
            dim_opt.jobs = jobs;
            auto freq = FrequencyVector::load(dim_freq);
            return cmd_dimension(freq, N_list, k_list, dim_opt, !no_timings, format, out_path);
        }
        if (*ver) {
            const json cfg = load_config(config_path);
            fallback(ver_suite_opt, cfg, "suite", ver_suite);
            fallback(ver_trials_opt, cfg, "trials", ver_opt.trials);
            fallback(ver_dmax_opt, cfg, "digit-max", ver_opt.digit_max);
            fallback(ver_lmax_opt, cfg, "len-max", ver_opt.len_max);
            fallback(ver_shared.seed, cfg, "seed", seed);
            fallback(ver_shared.format, cfg, "format", format);
            fallback(ver_shared.out, cfg, "out", out_path);
            ver_opt.seed = seed;
            return cmd_verify(ver_suite, ver_opt, format, out_path);
        }
        if (*smp) {
            const json cfg = load_config(config_path);
            fallback(smp_mode_opt, cfg, "mode", smp_mode);
            fallback(smp_freq_opt, cfg, "freq", smp_freq);
            fallback(smp_n_opt, cfg, "n", smp_n);
            fallback(smp_b_opt, cfg, "b", smp_b);
            fallback(smp_depths_opt, cfg, "depths", smp_depths);
            fallback(smp_count_opt, cfg, "count", smp_count);
            fallback(smp_shared.seed, cfg, "seed", seed);
            fallback(smp_shared.out, cfg, "out", out_path);
            return cmd_sample(smp_mode, smp_freq, smp_n, smp_b, smp_depths, seed, smp_count,
                              smp_zdigits, smp_zfreq, smp_zseed, out_path);
        }
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const resource_error& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return kExitBudget;
    } catch (const convergence_error& e) {
        std::cerr << "no convergence: " << e.what() << " (last level " << g12(e.last_value)
                  << ")\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
