#pragma once

// Runtime validation gates: the Hansen series against an independent Kepler
// quadrature, the fast tidal path against the exact sum, and the Taylor
// stepper against a tight Runge-Kutta reference. Each gate returns a verdict
// with a one-line detail string.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "spinorbit/fasteval.hpp"
#include "spinorbit/hansen.hpp"
#include "spinorbit/integrators.hpp"
#include "spinorbit/model.hpp"
#include "spinorbit/strips.hpp"

namespace spinorbit {

struct GateResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Independent route to X_k^{-3,2}(e): solve Kepler's equation M = E - e sin E
// by Newton iteration on a uniform grid, form (a/r)^3 {cos,sin}(2f), extract
// the k-th Fourier coefficient by the trapezoid rule (spectrally accurate for
// periodic integrands). Long double throughout.
inline long double hansen_x_m32_quadrature(int k, long double e, int grid = 8192) {
    const long double pi = 3.14159265358979323846264338327950288L;
    long double sum_c = 0.0L, sum_s = 0.0L;
    for (int i = 0; i < grid; ++i) {
        const long double M = 2.0L * pi * i / grid;
        long double E = M;
        for (int it = 0; it < 64; ++it) {
            const long double d = (M - (E - e * std::sin(E))) / (1.0L - e * std::cos(E));
            E += d;
            if (std::abs(d) < 1e-21L) break;
        }
        const long double r_over_a = 1.0L - e * std::cos(E);
        const long double f =
            2.0L * std::atan2(std::sqrt(1.0L + e) * std::sin(E / 2.0L),
                              std::sqrt(1.0L - e) * std::cos(E / 2.0L));
        const long double w = 1.0L / (r_over_a * r_over_a * r_over_a);
        sum_c += w * std::cos(2.0L * f) * std::cos(k * M);
        sum_s += w * std::sin(2.0L * f) * std::sin(k * M);
    }
    if (k == 0) return sum_c / grid;
    return (2.0L * sum_c / grid + 2.0L * sum_s / grid) / 2.0L;
}

// G20q table vs the quadrature, the vanishing q = -2 term, and the sign
// structure, at the table's own eccentricity.
inline GateResult hansen_gate(const HansenTable& tab, double tol = 1e-12) {
    GateResult r{"hansen", true, ""};
    double worst = 0.0;
    for (int q = kQTriLo; q <= kQTideHi; ++q) {
        const double ref = static_cast<double>(
            hansen_x_m32_quadrature(q + 2, static_cast<long double>(tab.e)));
        worst = std::max(worst, std::abs(tab.g20(q) - ref));
    }
    const bool zero_ok = std::abs(tab.g20(-2)) <= tol;
    bool signs_ok = tab.g20(-1) < 0.0;
    for (int q = kQTriLo; q <= kQTideHi; ++q)
        if (q != -1 && q != -2 && tab.g20(q) < 0.0) signs_ok = false;
    r.passed = worst <= tol && zero_ok && signs_ok;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max |table - quadrature| = %.3e (tol %.0e), G20,-2 %s, signs %s",
                  worst, tol, zero_ok ? "zero" : "NONZERO", signs_ok ? "ok" : "WRONG");
    r.detail = buf;
    return r;
}

// Fast tidal path: max |fast - exact| over random theta_dot in [0, 5n] plus
// the at-most-one-fractional-power contract.
inline GateResult fast_tide_gate(const ModelParams& p, const HansenTable& tab,
                                 const FastTide& fast, int samples = 100000,
                                 std::uint64_t seed = 2027) {
    GateResult r{"fast-tide", true, ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 5.0 * p.n());
    double worst = 0.0;
    std::uint64_t worst_pows = 0;
    for (int i = 0; i < samples; ++i) {
        const double td = u(rng);
        detail::frac_pow_count = 0;
        const double f = accel_tide_fast(td, fast);
        const std::uint64_t pows = detail::frac_pow_count;
        worst = std::max(worst, std::abs(f - accel_tide_exact(td, p, tab)));
        worst_pows = std::max(worst_pows, pows);
    }
    r.passed = worst <= FastTide::max_abs_error && worst_pows <= 1;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max |fast - exact| = %.3e (tol %.0e), max fractional powers "
                  "per eval = %llu",
                  worst, FastTide::max_abs_error,
                  static_cast<unsigned long long>(worst_pows));
    r.detail = buf;
    return r;
}

// Taylor-stepper error gate: per H strip, uniform random states advanced one
// full period by the stepper and by the 1e-15 reference Runge-Kutta on the
// exact model; component differences must stay within the stated bounds.
inline GateResult hem_gate(const ModelParams& p, const HansenTable& tab,
                           const StripLayout& lay, const StepperConfig& cfg,
                           int samples_per_strip = 250, double tol_theta = 3e-13,
                           double tol_theta_dot = 1.4e-12,
                           std::uint64_t seed = 515) {
    GateResult r{"hem", true, ""};
    const HemEngine hem(p, tab, lay, cfg);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uth(0.0, M_PI);
    double worst_th = 0.0, worst_td = 0.0;
    int worst_strip = -1;
    for (int si = 0; si < static_cast<int>(lay.strips.size()); ++si) {
        const Strip& strip = lay.strips[static_cast<std::size_t>(si)];
        if (strip.kind != StripKind::H) continue;
        std::uniform_real_distribution<double> utd(strip.lo, strip.hi);
        for (int i = 0; i < samples_per_strip; ++i) {
            State a{uth(rng), utd(rng), 0.0};
            double y[2] = {a.theta, a.theta_dot};
            for (int sub = 0; sub < kSubstepsPerPeriod; ++sub)
                a = hem.step_at(a, si, sub);
            OdeRhsReference rhs{&p, &tab};
            // pure absolute tolerance, one digit below the nominal 1e-15:
            // with a relative term or a laxer controller budget the reference
            // itself can drift by a few e-12 at theta_dot ~ 1e2, swamping a
            // gate that sits at 3e-13
            Dop853<OdeRhsReference> rk(rhs, 1e-16, 0.0);
            rk.integrate(y, 0.0, p.period());
            const double dth = std::abs(a.theta - y[0]);
            const double dtd = std::abs(a.theta_dot - y[1]);
            if (dth > worst_th) {
                worst_th = dth;
                worst_strip = si;
            }
            if (dtd > worst_td) worst_td = dtd;
        }
    }
    r.passed = worst_th <= tol_theta && worst_td <= tol_theta_dot;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "per-period max |dtheta| = %.3e (tol %.0e), max |dtheta_dot| = "
                  "%.3e (tol %.1e), worst strip %d",
                  worst_th, tol_theta, worst_td, tol_theta_dot, worst_strip);
    r.detail = buf;
    return r;
}

} // namespace spinorbit
