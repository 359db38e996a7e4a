#pragma once

/**
 * @file frequency.hpp
 * @brief Prescribed digit-frequency laws: finite support or a parametric
 *        power-log tail, with JSON (de)serialization.
 *
 * JSON schema:
 *   {"entries": [[j, p_j], ...],
 *    "tail": null | {"family": "power_log", "c": real, "a": real, "b": real},
 *    "normalize": bool}
 * A power_log tail means p_j = c * j^-a * log(j+1)^-b for every j beyond
 * the explicit entries. With "normalize": true the loader computes c (or
 * rescales the entries when there is no tail) so the total mass is 1.
 */

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bigmath.hpp"

namespace cfdim {

enum class LogMomentClass { finite, infinite, unknown };

/// p_j = c * j^-a * (log(j+1))^-b for j >= first_j.
struct PowerLogTail {
    double c = 0.0;
    double a = 2.0;
    double b = 0.0;
    std::uint32_t first_j = 1;

    double density(std::uint64_t j) const {
        return c * std::pow(double(j), -a) * std::pow(std::log(double(j) + 1.0), -b);
    }
};

namespace detail {

/// sum_{j >= from} j^-a log(j+1)^-b with c = 1. Direct summation up to
/// a cut, then the Euler-Maclaurin midpoint integral under u = log(x+1),
/// where the integrand becomes u^-b e^-((a-1)u) (1 - e^-u)^-a. For a = 1
/// the u-integral has the closed-form remainder U^(1-b)/(b-1).
inline double power_log_series_sum(double a, double b, std::uint64_t from) {
    if (a < 1.0 || (a == 1.0 && b <= 1.0))
        throw std::domain_error("power_log tail: series diverges (need a > 1, or a = 1 and b > 1)");
    if (from < 1) from = 1;
    const std::uint64_t cut = from + 100'000;
    double direct = 0.0;
    for (std::uint64_t j = from; j <= cut; ++j)
        direct += std::pow(double(j), -a) * std::pow(std::log(double(j) + 1.0), -b);

    const double u0 = std::log(double(cut) + 1.5);  // u at x = cut + 1/2
    double U = (a == 1.0) ? 60.0 : std::max(u0 + 5.0, 60.0 / (a - 1.0) + u0);
    if (U > 1400.0) U = 1400.0;

    auto integrand = [&](double u) {
        const double eu = std::exp(-u);
        return std::pow(u, -b) * std::exp(-(a - 1.0) * u) * std::pow(1.0 - eu, -a);
    };
    // Composite Simpson; the integrand is smooth and slowly varying in u.
    const int steps = 1 << 17;
    const double hstep = (U - u0) / steps;
    double simpson = integrand(u0) + integrand(U);
    for (int i = 1; i < steps; ++i)
        simpson += integrand(u0 + hstep * i) * ((i & 1) ? 4.0 : 2.0);
    simpson *= hstep / 3.0;

    double remainder = 0.0;
    if (a == 1.0) remainder = std::pow(U, 1.0 - b) / (b - 1.0);
    return direct + simpson + remainder;
}

}  // namespace detail

/// Frequency vector p = (p_1, p_2, ...): explicit masses on an initial
/// range plus an optional parametric tail. Total mass is 1.
class FrequencyVector {
public:
    /// Finite-support vector from (digit, mass) pairs.
    static FrequencyVector from_entries(const std::vector<std::pair<std::uint32_t, double>>& e,
                                        bool normalize = false) {
        FrequencyVector f;
        for (auto [j, p] : e) f.set_entry(j, p);
        f.finalize(normalize);
        return f;
    }

    /// Pure power-log law p_j = c j^-a log(j+1)^-b on all of N, c chosen
    /// so the masses sum to 1.
    static FrequencyVector power_log(double a, double b) {
        FrequencyVector f;
        f.tail_ = PowerLogTail{1.0, a, b, 1};
        f.finalize(true);
        return f;
    }

    /// Gauss-measure digit frequencies p_j = log2(1 + 1/(j(j+2))),
    /// explicit up to explicit_count and a normalized ~1/j^2 tail beyond.
    static FrequencyVector gauss(std::uint32_t explicit_count = 256) {
        FrequencyVector f;
        for (std::uint32_t j = 1; j <= explicit_count; ++j)
            f.set_entry(j, std::log2(1.0 + 1.0 / (double(j) * (double(j) + 2.0))));
        f.tail_ = PowerLogTail{1.0, 2.0, 0.0, explicit_count + 1};
        f.finalize(true);
        return f;
    }

    static FrequencyVector from_json(const nlohmann::json& js) {
        FrequencyVector f;
        if (!js.contains("entries") || !js["entries"].is_array())
            throw std::domain_error("FrequencyVector: missing \"entries\" array");
        for (const auto& item : js["entries"]) {
            if (!item.is_array() || item.size() != 2)
                throw std::domain_error("FrequencyVector: entries must be [j, p_j] pairs");
            f.set_entry(item[0].get<std::uint32_t>(), item[1].get<double>());
        }
        if (js.contains("tail") && !js["tail"].is_null()) {
            const auto& t = js["tail"];
            if (t.value("family", "") != std::string("power_log"))
                throw std::domain_error("FrequencyVector: unknown tail family");
            PowerLogTail tail;
            tail.a = t.at("a").get<double>();
            tail.b = t.at("b").get<double>();
            tail.c = (t.contains("c") && !t["c"].is_null()) ? t["c"].get<double>() : 1.0;
            tail.first_j = f.entries_.empty() ? 1 : f.entries_.rbegin()->first + 1;
            f.tail_ = tail;
        }
        f.finalize(js.value("normalize", false));
        return f;
    }

    static FrequencyVector load(const std::string& path);

    nlohmann::json to_json() const {
        nlohmann::json js;
        js["entries"] = nlohmann::json::array();
        for (auto [j, p] : entries_) js["entries"].push_back({j, p});
        if (tail_) {
            js["tail"] = {{"family", "power_log"}, {"c", tail_->c}, {"a", tail_->a}, {"b", tail_->b}};
        } else {
            js["tail"] = nullptr;
        }
        js["normalize"] = false;
        return js;
    }

    /// Mass of digit j.
    double mass(std::uint64_t j) const {
        if (j < 1) throw std::domain_error("FrequencyVector::mass: digit must be >= 1");
        if (j <= UINT32_MAX) {
            auto it = entries_.find(static_cast<std::uint32_t>(j));
            if (it != entries_.end()) return it->second;
        }
        if (tail_ && j >= tail_->first_j) return tail_->density(j);
        return 0.0;
    }

    /// sum_{i <= j} p_i.
    double prefix_mass(std::uint64_t j) const {
        KahanSum s;
        for (auto [d, p] : entries_) {
            if (d > j) break;
            s.add(p);
        }
        if (tail_ && j >= tail_->first_j)
            for (std::uint64_t i = tail_->first_j; i <= j; ++i) s.add(tail_->density(i));
        return std::min(s.value(), 1.0);
    }

    bool has_tail() const { return tail_.has_value(); }
    const std::optional<PowerLogTail>& tail() const { return tail_; }
    const std::map<std::uint32_t, double>& entries() const { return entries_; }

    /// Largest digit with positive mass, or 0 when the support is infinite.
    std::uint32_t finite_support_bound() const {
        if (tail_) return 0;
        std::uint32_t hi = 0;
        for (auto [j, p] : entries_)
            if (p > 0.0) hi = j;
        return hi;
    }

    LogMomentClass moment_class() const { return moment_class_; }

private:
    void set_entry(std::uint32_t j, double p) {
        if (j < 1) throw std::domain_error("FrequencyVector: digits must be >= 1");
        if (p < 0.0 || !std::isfinite(p))
            throw std::domain_error("FrequencyVector: masses must be finite and >= 0");
        if (!entries_.emplace(j, p).second)
            throw std::domain_error("FrequencyVector: duplicate digit entry");
    }

    void finalize(bool normalize) {
        if (entries_.empty() && !tail_)
            throw std::domain_error("FrequencyVector: no entries and no tail");
        KahanSum es;
        for (auto [j, p] : entries_) es.add(p);
        const double explicit_mass = es.value();

        if (tail_) {
            tail_->first_j = entries_.empty() ? 1 : entries_.rbegin()->first + 1;
            const double series = detail::power_log_series_sum(tail_->a, tail_->b, tail_->first_j);
            if (normalize) {
                const double deficit = 1.0 - explicit_mass;
                if (deficit < -1e-12)
                    throw std::domain_error("FrequencyVector: explicit entries exceed total mass 1");
                tail_->c = deficit > 0.0 ? deficit / series : 0.0;
                if (tail_->c == 0.0) tail_.reset();
            } else if (std::abs(explicit_mass + tail_->c * series - 1.0) > 1e-12) {
                throw std::domain_error("FrequencyVector: masses do not sum to 1");
            }
        } else if (normalize) {
            if (explicit_mass <= 0.0)
                throw std::domain_error("FrequencyVector: cannot normalize zero mass");
            for (auto& [j, p] : entries_) p /= explicit_mass;
        } else if (std::abs(explicit_mass - 1.0) > 1e-12) {
            throw std::domain_error("FrequencyVector: masses do not sum to 1");
        }

        moment_class_ = classify_moment();
    }

    /// sum p_j log j: finite for a finite support or a tail with a > 1;
    /// for a = 1 finite iff b > 2.
    LogMomentClass classify_moment() const {
        if (!tail_) return LogMomentClass::finite;
        if (tail_->a > 1.0) return LogMomentClass::finite;
        if (tail_->a == 1.0) return tail_->b > 2.0 ? LogMomentClass::finite : LogMomentClass::infinite;
        return LogMomentClass::unknown;
    }

    std::map<std::uint32_t, double> entries_;
    std::optional<PowerLogTail> tail_;
    LogMomentClass moment_class_ = LogMomentClass::unknown;
};

}  // namespace cfdim

#include <fstream>

namespace cfdim {

inline FrequencyVector FrequencyVector::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("FrequencyVector: cannot open " + path);
    nlohmann::json js;
    in >> js;
    return from_json(js);
}

}  // namespace cfdim
