#pragma once

// Test-only oracles. Nothing here is used by the library: these provide
// independent routes to quantities the implementation computes exactly,
// so the two sides can be compared in tests.

#include <cmath>
#include <cstdint>
#include <random>

namespace oracles {

// Floating point with an explicit binary exponent: value = m * 2^e with
// m in [1,2). Tracks quantities like continued-fraction denominators far
// past double range while only their logarithm is needed.
struct Scaled {
    double m = 0.0;
    long e = 0;

    static Scaled from(double v) {
        Scaled s;
        int ex = 0;
        s.m = std::frexp(v, &ex);
        s.e = ex;
        return s;
    }

    bool zero() const { return m == 0.0; }

    double log() const { return std::log(m) + double(e) * std::log(2.0); }
};

inline Scaled scaled_add(const Scaled& a, const Scaled& b) {
    if (a.zero()) return b;
    if (b.zero()) return a;
    const long diff = a.e - b.e;
    if (diff >= 64) return a;
    if (diff <= -64) return b;
    Scaled out;
    out.e = a.e;
    out.m = a.m + std::ldexp(b.m, int(-diff));
    int ex = 0;
    out.m = std::frexp(out.m, &ex);
    out.e += ex;
    return out;
}

inline Scaled scaled_scale(double a, const Scaled& q) {
    if (q.zero() || a == 0.0) return Scaled{};
    int ex = 0;
    const double am = std::frexp(a, &ex);
    Scaled out;
    out.m = am * q.m;
    out.e = q.e + ex;
    int ex2 = 0;
    out.m = std::frexp(out.m, &ex2);
    out.e += ex2;
    return out;
}

// One double-precision Gauss-map orbit: Birkhoff average of 2|log x| and
// the SMB entropy estimate -log mu_G(I_n)/n from the cylinder length
// (tracked in scaled floats) and the Gauss density at the seed.
struct GaussOrbitEstimate {
    double lyapunov_birkhoff = 0.0;  // (1/n) sum 2|log x_k|
    double entropy_smb = 0.0;        // -(1/n) log mu_G(I_n(x_0))
};

inline GaussOrbitEstimate gauss_orbit_estimate(double x0, long n, std::mt19937_64& eng) {
    auto unit = [&] { return double(eng() >> 11) * 0x1.0p-53; };
    double x = x0;
    double birkhoff = 0.0;
    Scaled q = Scaled::from(1.0), q_prev;  // q_0 = 1, q_{-1} = 0
    for (long k = 0; k < n; ++k) {
        birkhoff += -2.0 * std::log(x);
        const double inv = 1.0 / x;
        const double digit = std::floor(inv);
        double nx = inv - digit;
        if (!(nx > 0.0 && nx < 1.0)) nx = 0.5 * (1.0 + unit());  // orbit hit a rational
        const Scaled qn = scaled_add(scaled_scale(digit, q), q_prev);
        q_prev = q;
        q = qn;
        x = nx;
    }
    GaussOrbitEstimate est;
    est.lyapunov_birkhoff = birkhoff / double(n);
    const double log_len = -(q.log() + scaled_add(q, q_prev).log());
    const double log_mu = log_len - std::log1p(x0) - std::log(std::log(2.0));
    est.entropy_smb = -log_mu / double(n);
    return est;
}

// Levy's constant: the Lyapunov exponent 2 int |log x| d(Gauss measure).
inline double levy_lyapunov() { return M_PI * M_PI / (6.0 * std::log(2.0)); }

}  // namespace oracles
