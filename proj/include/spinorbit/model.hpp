#pragma once

// Physical parameters of the star/planet system and exact evaluation of the
// triaxiality and tidal angular accelerations, plus the first derivative of
// the tidal one. Units are kg, km, yr throughout.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinorbit/hansen.hpp"
#include "spinorbit/specfun.hpp"
#include "spinorbit/taylor.hpp"

namespace spinorbit {

// Raw physical constants. Defaults are the Sun/Mercury values.
struct PhysicalParams {
    double a = 5.791e7;          // semimajor axis, km
    double n = 26.0879;          // mean motion, rad/yr
    double R = 2.44e3;           // planetary radius, km
    double xi = 0.346;           // dimensionless moment of inertia C/(M R^2)
    double triax = 9.350e-5;     // (B - A)/C
    double M_planet = 3.301e23;  // kg
    double mu = 7.967e28;        // unrelaxed rigidity, kg km^-1 yr^-2
    double e = 0.2056;           // orbital eccentricity
    double tau_A = 500.0;        // Andrade time, yr
    double tau_M = 500.0;        // Maxwell time, yr
    double alpha = 0.2;          // Andrade parameter
    double M_star = 1.989e30;    // kg
    double G = 6.646e-5;         // kg^-1 km^3 yr^-2
};

// Parameters plus derived acceleration constants, frozen at construction.
//
//   zeta = 3 (B-A) n^2 / (2 xi M R^2)          (triaxiality constant)
//   eta  = 3 pi (2l^2+4l+3) mu M*^2 R^7 / (l(l-1) xi M^3 a^6), l = 2
//   A2   = 4 pi (2l^2+4l+3) mu R^4 / (3 l G M^2), l = 2
class ModelParams {
public:
    ModelParams() : ModelParams(PhysicalParams{}) {}

    explicit ModelParams(const PhysicalParams& raw) : raw_(raw) {
        if (!(raw.tau_A > 0.0) || !(raw.tau_M > 0.0))
            throw std::domain_error("ModelParams: tau_A and tau_M must be positive");
        if (!(raw.alpha > 0.0 && raw.alpha < 1.0))
            throw std::domain_error("ModelParams: alpha must lie in (0, 1)");
        if (!(raw.e >= 0.0 && raw.e < 1.0))
            throw std::domain_error("ModelParams: eccentricity outside [0, 1)");
        // (B - A) = triax * C with C = xi M R^2, so the moments cancel:
        zeta_ = 1.5 * raw.triax * raw.n * raw.n;
        const double a6 = std::pow(raw.a, 6);
        eta_ = 3.0 * M_PI * 19.0 * raw.mu * raw.M_star * raw.M_star * std::pow(raw.R, 7)
               / (2.0 * raw.xi * std::pow(raw.M_planet, 3) * a6);
        A2_ = 4.0 * M_PI * 19.0 * raw.mu * std::pow(raw.R, 4)
              / (6.0 * raw.G * raw.M_planet * raw.M_planet);
        // Andrade lag pieces: chi^{1-alpha} tau_A^{-alpha} Gamma(alpha+1) {cos,sin}(alpha pi/2)
        const double g = gamma_fn(raw.alpha + 1.0);
        const double ta = std::pow(raw.tau_A, -raw.alpha);
        andrade_cos_ = ta * g * std::cos(raw.alpha * M_PI / 2.0);
        andrade_sin_ = ta * g * std::sin(raw.alpha * M_PI / 2.0);
    }

    const PhysicalParams& raw() const { return raw_; }
    double n() const { return raw_.n; }
    double e() const { return raw_.e; }
    double zeta() const { return zeta_; }
    double eta() const { return eta_; }
    double A2() const { return A2_; }
    double alpha() const { return raw_.alpha; }
    double tau_M() const { return raw_.tau_M; }
    double andrade_cos() const { return andrade_cos_; }
    double andrade_sin() const { return andrade_sin_; }
    double period() const { return 2.0 * M_PI / raw_.n; }   // T0, one orbit

private:
    PhysicalParams raw_;
    double zeta_ = 0.0, eta_ = 0.0, A2_ = 0.0;
    double andrade_cos_ = 0.0, andrade_sin_ = 0.0;
};

// Phase point of the spin ODE.
struct State {
    double theta = 0.0;       // rad
    double theta_dot = 0.0;   // rad/yr
    double t = 0.0;           // yr
};

// Key/value parameter file: one `name = value` per line, '#' comments,
// names as in PhysicalParams. Unknown keys are rejected.
inline PhysicalParams parse_params(const std::map<std::string, double>& kv) {
    PhysicalParams p;
    for (const auto& [key, val] : kv) {
        if (key == "a") p.a = val;
        else if (key == "n") p.n = val;
        else if (key == "R") p.R = val;
        else if (key == "xi") p.xi = val;
        else if (key == "triax") p.triax = val;
        else if (key == "M_planet") p.M_planet = val;
        else if (key == "mu") p.mu = val;
        else if (key == "e") p.e = val;
        else if (key == "tau_A") p.tau_A = val;
        else if (key == "tau_M") p.tau_M = val;
        else if (key == "alpha") p.alpha = val;
        else if (key == "M_star") p.M_star = val;
        else if (key == "G") p.G = val;
        else throw std::domain_error("unknown parameter key: " + key);
    }
    return p;
}

namespace detail {

// Counts fractional-power evaluations on the current thread; used to verify
// the "at most one fractional power per fast evaluation" contract.
inline thread_local std::uint64_t frac_pow_count = 0;

inline double frac_pow(double x, double p) {
    ++frac_pow_count;
    return std::pow(x, p);
}

} // namespace detail

// Triaxiality angular acceleration
//   -zeta * sum_{q in Q_TRI} G_{20q}(e) sin(2 theta - (q+2) n t).
inline double accel_tri(double theta, double t, const ModelParams& p,
                        const HansenTable& tab) {
    const double two_theta = 2.0 * theta;
    const double nt = p.n() * t;
    double s = 0.0;
    for (int q = kQTriLo; q <= kQTriHi; ++q)
        s += tab.g20(q) * std::sin(two_theta - (q + 2) * nt);
    return -p.zeta() * s;
}

// omega_220q = (q+2) n - 2 theta_dot, evaluated with the product explicitly
// rounded first. This keeps omega exactly zero when theta_dot sits on a
// representable kink, which FMA contraction of the one-line form would break
// (sgn(0) = 0 makes the q-term vanish exactly there).
inline double mode_frequency(int q, double n, double theta_dot) {
    volatile double qn = (q + 2) * n;
    return qn - 2.0 * theta_dot;
}

// P2(chi) = I'(chi) chi / ((R'(chi) + A2 chi)^2 + I'(chi)^2) with
//   R'(chi) = chi + chi^{1-alpha} tau_A^{-alpha} cos(alpha pi/2) Gamma(alpha+1)
//   I'(chi) = -1/tau_M - chi^{1-alpha} tau_A^{-alpha} sin(alpha pi/2) Gamma(alpha+1)
// chi >= 0. P2(0) = 0.
inline double tide_quality_p2(double chi, const ModelParams& p) {
    if (chi == 0.0) return 0.0;
    const double x = detail::frac_pow(chi, 1.0 - p.alpha());
    const double rp = chi + x * p.andrade_cos();
    const double ip = -1.0 / p.tau_M() - x * p.andrade_sin();
    const double ra = rp + p.A2() * chi;
    return ip * chi / (ra * ra + ip * ip);
}

// Single tidal mode as a function of its own frequency omega = (q+2) n - 2 theta_dot:
//   -eta G_{20q}^2 P2(|omega|) sgn(omega).  Odd in omega; zero at omega = 0.
inline double tide_mode_accel(int q, double omega, const ModelParams& p,
                              const HansenTable& tab) {
    if (omega == 0.0) return 0.0;
    const double sgn = (omega > 0.0) ? 1.0 : -1.0;
    const double g = tab.g20(q);
    return -p.eta() * g * g * tide_quality_p2(std::abs(omega), p) * sgn;
}

// Tidal angular acceleration, secular part: sum of the nine q-modes.
inline double accel_tide_exact(double theta_dot, const ModelParams& p,
                               const HansenTable& tab) {
    double s = 0.0;
    for (int q = kQTideLo; q <= kQTideHi; ++q) {
        const double omega = mode_frequency(q, p.n(), theta_dot);
        s += tide_mode_accel(q, omega, p, tab);
    }
    return s;
}

// Taylor coefficients (about theta_dot0, degree deg) of the tidal
// acceleration, by jet arithmetic through P2. theta_dot0 must not sit on a
// kink; each mode keeps a fixed sign over the expansion.
inline void tide_taylor_coeffs(double theta_dot0, int deg, const ModelParams& p,
                               const HansenTable& tab, double* out) {
    const std::size_t n = static_cast<std::size_t>(deg) + 1;
    std::vector<double> chi(n, 0.0), x(n), rp(n), ip(n), ra(n), num(n), den(n),
        tmp(n), p2(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
    for (int q = kQTideLo; q <= kQTideHi; ++q) {
        const double omega = mode_frequency(q, p.n(), theta_dot0);
        if (omega == 0.0)
            throw std::domain_error("tide_taylor_coeffs: expansion point on a kink");
        const double sgn = (omega > 0.0) ? 1.0 : -1.0;
        chi[0] = std::abs(omega);
        chi[1] = -2.0 * sgn;                      // d|omega|/d theta_dot
        jet::pow(chi.data(), 1.0 - p.alpha(), x.data(), n);
        for (std::size_t j = 0; j < n; ++j) {
            rp[j] = chi[j] + x[j] * p.andrade_cos();
            ip[j] = -x[j] * p.andrade_sin();
            ra[j] = rp[j] + p.A2() * chi[j];
        }
        ip[0] -= 1.0 / p.tau_M();
        jet::mul(ip.data(), chi.data(), num.data(), n);
        jet::mul(ra.data(), ra.data(), den.data(), n);
        jet::mul(ip.data(), ip.data(), tmp.data(), n);
        for (std::size_t j = 0; j < n; ++j) den[j] += tmp[j];
        jet::div(num.data(), den.data(), p2.data(), n);
        const double g = tab.g20(q);
        const double w = -p.eta() * g * g * sgn;
        for (std::size_t j = 0; j < n; ++j) out[j] += w * p2[j];
    }
}

// d(accel_tide_exact)/d(theta_dot). Refused exactly at a kink, where the
// one-sided limits differ in slope.
inline double accel_tide_deriv(double theta_dot, const ModelParams& p,
                               const HansenTable& tab) {
    for (int q = kQTideLo; q <= kQTideHi; ++q)
        if (mode_frequency(q, p.n(), theta_dot) == 0.0)
            throw std::domain_error("accel_tide_deriv: evaluation at a kink");
    double coeffs[2];
    tide_taylor_coeffs(theta_dot, 1, p, tab, coeffs);
    return coeffs[1];
}

} // namespace spinorbit
