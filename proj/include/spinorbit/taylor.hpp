#pragma once

// Truncated power-series (jet) arithmetic on contiguous coefficient arrays.
// A jet of length n holds coefficients c[0..n-1] of sum_j c[j] x^j. All
// routines work in-place-friendly styles on raw pointers; callers own sizing.

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace spinorbit::jet {

// c = a * b, all of length n (full Cauchy product truncated at n)
inline void mul(const double* a, const double* b, double* c, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k <= j; ++k) s += a[k] * b[j - k];
        c[j] = s;
    }
}

// c = a / b (b[0] != 0)
inline void div(const double* a, const double* b, double* c, std::size_t n) {
    if (b[0] == 0.0) throw std::domain_error("jet::div: zero leading coefficient");
    for (std::size_t j = 0; j < n; ++j) {
        double s = a[j];
        for (std::size_t k = 1; k <= j; ++k) s -= b[k] * c[j - k];
        c[j] = s / b[0];
    }
}

// v = u^p for real exponent p, u[0] > 0, via the logarithmic-derivative
// recurrence j u[0] v[j] = sum_{k=1..j} (p k - (j - k)) u[k] v[j-k].
inline void pow(const double* u, double p, double* v, std::size_t n) {
    if (!(u[0] > 0.0)) throw std::domain_error("jet::pow: requires positive leading coefficient");
    v[0] = std::pow(u[0], p);
    for (std::size_t j = 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 1; k <= j; ++k)
            s += (p * static_cast<double>(k) - static_cast<double>(j - k)) * u[k] * v[j - k];
        v[j] = s / (static_cast<double>(j) * u[0]);
    }
}

// In-place Taylor shift: given p(x) = sum p[k] x^k, rewrite coefficients so
// that p[k] become the coefficients of p(x0 + u) in powers of u.
inline void shift(double* p, std::size_t n, double x0) {
    if (n < 2) return;
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t j = n - 2; j + 1 >= k + 1; --j) {
            p[j] += x0 * p[j + 1];
            if (j == k) break;   // unsigned loop guard
        }
}

// Horner evaluation of a jet's polynomial at x.
inline double eval(const double* c, std::size_t n, double x) {
    double r = 0.0;
    for (std::size_t j = n; j > 0; --j) r = r * x + c[j - 1];
    return r;
}

} // namespace spinorbit::jet
