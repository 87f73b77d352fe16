#pragma once

// Test-only oracles, independent of the library implementation paths they
// check: a long-double Bessel power series and finite-difference helpers.
// The Kepler quadrature route for Hansen coefficients lives in
// spinorbit/validation.hpp (it also backs the validate subcommand).

#include <cmath>
#include <cstddef>
#include <functional>

#include "spinorbit/validation.hpp"

namespace oracles {

using spinorbit::hansen_x_m32_quadrature;

// Ascending series for J_k(x), k >= 0, in long double.
inline long double bessel_j_series_ld(int k, long double x) {
    const long double half = x / 2.0L;
    long double term = 1.0L;
    for (int i = 1; i <= k; ++i) term *= half / i;
    long double sum = term;
    for (int m = 0; m < 200; ++m) {
        term *= -half * half / (static_cast<long double>(m + 1) * (k + m + 1));
        sum += term;
        if (std::abs(term) < 1e-25L * std::abs(sum) && m > 4) break;
    }
    return sum;
}

// Central finite difference of f at x.
inline double fd_derivative(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Five-point central difference (4th order).
inline double fd_derivative5(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

} // namespace oracles
