#pragma once

// Special functions needed by the Hansen coefficient series: integer-order
// Bessel functions of the first kind, the gamma function, and binomial
// coefficients extended to all integer arguments.

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinorbit {

namespace detail {

// Ascending power series, J_k(x) = sum_m (-1)^m (x/2)^(k+2m) / (m! (k+m)!),
// for k >= 0, starting from the supplied leading term t0 = (x/2)^k / k!.
inline double bessel_j_series(int k, double x, double t0) {
    const double half = 0.5 * x;
    double term = t0;
    double sum = term;
    const double h2 = half * half;
    for (int m = 0; m < 400; ++m) {
        term *= -h2 / (static_cast<double>(m + 1) * static_cast<double>(k + m + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30) && m > 2) break;
    }
    return sum;
}

// Miller backward recurrence with normalisation J_0 + 2 J_2 + 2 J_4 + ... = 1,
// for k >= 0, x > 0. Used where the ascending series would cancel.
inline double bessel_j_miller(int k, double x) {
    const int start = std::max(k, static_cast<int>(std::ceil(x))) + 42;
    double fp1 = 0.0;            // f_{m+1}
    double f = 1e-300;           // f_m
    double norm = 0.0;
    double fk = 0.0;
    for (int m = start; m >= 0; --m) {
        const double fm1 = (2.0 * (m + 1) / x) * f - fp1;
        fp1 = f;
        f = fm1;
        if (m == k) fk = f;
        if (m % 2 == 0) norm += (m == 0) ? f : 2.0 * f;
        if (std::abs(f) > 1e250) {       // rescale to avoid overflow
            f *= 1e-250;
            fp1 *= 1e-250;
            fk *= 1e-250;
            norm *= 1e-250;
        }
    }
    return fk / norm;
}

} // namespace detail

// J_k(x), k-th order Bessel function of the first kind, any integer k.
// Absolute error <= 1e-15 over |x| <= 20, |k| <= 40.
inline double bessel_j(int k, double x) {
    if (!std::isfinite(x))
        throw std::domain_error("bessel_j: non-finite argument");
    // J_{-k}(x) = (-1)^k J_k(x); J_k(-x) = (-1)^k J_k(x)
    double sign = 1.0;
    if (k < 0) {
        k = -k;
        if (k % 2 != 0) sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (k % 2 != 0) sign = -sign;
    }
    if (x == 0.0) return (k == 0) ? 1.0 : 0.0;
    // Leading term (x/2)^k / k! and a bound on the largest series term,
    // t0 exp(x^2/(4(k+1))). The alternating series is used only while that
    // bound stays small, so no more than ~1 digit can cancel; otherwise the
    // Miller recurrence takes over.
    const double half = 0.5 * x;
    double t0 = 1.0;
    for (int i = 1; i <= k; ++i) t0 *= half / static_cast<double>(i);
    if (t0 == 0.0) return 0.0;   // |J_k| below any representable magnitude here
    const bool series_ok = t0 * std::exp(x * x / (4.0 * (k + 1.0))) <= 10.0;
    const double v = series_ok ? detail::bessel_j_series(k, x, t0)
                               : detail::bessel_j_miller(k, x);
    return sign * v;
}

// Binomial coefficient extended to all integer arguments:
// (l m) = l(l-1)...(l-m+1)/m! for m >= 1, 1 for m = 0, 0 for m < 0.
inline double binomial_ext(int l, int m) {
    if (m < 0) return 0.0;
    if (m == 0) return 1.0;
    double num = 1.0;
    for (int i = 0; i < m; ++i) num *= static_cast<double>(l - i);
    double den = 1.0;
    for (int i = 2; i <= m; ++i) den *= static_cast<double>(i);
    return num / den;
}

// Gamma function for x > 0 (Lanczos, g = 7). Relative accuracy better than
// 1e-14 on [1, 2], the interval exercised by the Andrade quality function.
inline double gamma_fn(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn: requires x > 0, got " + std::to_string(x));
    static constexpr double coef[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,     12.507343278686905,
        -0.13857109526572012,      9.9843695780195716e-6,  1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection, only reachable for 0 < x < 0.5
        return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
    }
    const double z = x - 1.0;
    double a = coef[0];
    for (int i = 1; i < 9; ++i) a += coef[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

} // namespace spinorbit
