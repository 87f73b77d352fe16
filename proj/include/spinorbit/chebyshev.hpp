#pragma once

// Chebyshev interpolation on an interval: coefficients from samples at
// Chebyshev-Gauss nodes, evaluation by Clenshaw recurrence.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spinorbit {

struct ChebFit {
    double lo = 0.0, hi = 0.0;      // interval
    std::vector<double> coeffs;     // c_0 .. c_degree

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    double eval(double x) const {
        const double u = (2.0 * x - lo - hi) / (hi - lo);
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t j = coeffs.size() - 1; j > 0; --j) {
            const double b0 = 2.0 * u * b1 - b2 + coeffs[j];
            b2 = b1;
            b1 = b0;
        }
        return u * b1 - b2 + coeffs[0];
    }

    template <class F>
    static ChebFit fit(F&& f, double lo, double hi, int degree) {
        if (!(hi > lo)) throw std::domain_error("ChebFit: degenerate interval");
        const int N = degree + 1;
        std::vector<double> fx(static_cast<std::size_t>(N));
        for (int k = 0; k < N; ++k) {
            const double u = std::cos(M_PI * (k + 0.5) / N);
            fx[static_cast<std::size_t>(k)] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * u);
        }
        ChebFit c;
        c.lo = lo;
        c.hi = hi;
        c.coeffs.resize(static_cast<std::size_t>(N));
        for (int j = 0; j < N; ++j) {
            double s = 0.0;
            for (int k = 0; k < N; ++k)
                s += fx[static_cast<std::size_t>(k)] * std::cos(M_PI * j * (k + 0.5) / N);
            c.coeffs[static_cast<std::size_t>(j)] = (j == 0 ? 1.0 : 2.0) * s / N;
        }
        return c;
    }
};

} // namespace spinorbit
