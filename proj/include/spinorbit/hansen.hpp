#pragma once

// Hansen coefficients X_k^{n,m}(e) and the G_{20q}(e) table that feeds both
// the triaxiality and tidal torques (G_{lpq} = X_{l-p+q}^{-l-1, l-2p}).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinorbit/specfun.hpp"

namespace spinorbit {

// X_k^{n,m}(e) = (1+z^2)^{-n-1} sum_{g>=0} (-z)^g sum_{h=0}^{g}
//                C^{n,m}_{g-h,h} J_{k-m+g-2h}(ke),  z = (1-sqrt(1-e^2))/e,
// C^{n,m}_{r,s} = (n+1+m r)(n+1-m s), truncated at g = g_max.
// If `converged` is given, it is set to false when the last retained g-term
// still exceeds 1e-16 in magnitude.
inline double hansen_x(int k, int n, int m, double e, int g_max,
                       bool* converged = nullptr) {
    if (!(e >= 0.0 && e < 1.0))
        throw std::domain_error("hansen_x: eccentricity outside [0, 1)");
    if (g_max < 1) throw std::domain_error("hansen_x: g_max must be >= 1");
    if (converged) *converged = true;
    if (e == 0.0) return (k == m) ? 1.0 : 0.0;   // z = 0 limit

    const double z = (1.0 - std::sqrt(1.0 - e * e)) / e;
    const double ke = k * e;
    double zg = 1.0;        // (-z)^g
    double sum = 0.0;
    double last = 0.0;
    for (int g = 0; g <= g_max; ++g) {
        double inner = 0.0;
        for (int h = 0; h <= g; ++h) {
            const double c = binomial_ext(n + 1 + m, g - h) * binomial_ext(n + 1 - m, h);
            if (c != 0.0) inner += c * bessel_j(k - m + g - 2 * h, ke);
        }
        last = zg * inner;
        sum += last;
        zg *= -z;
    }
    if (converged && std::abs(last) > 1e-16) *converged = false;
    const double w = 1.0 + z * z;
    return std::pow(w, static_cast<double>(-n - 1)) * sum;
}

// Table of G_{20q}(e) over a contiguous q interval.
struct HansenTable {
    double e = 0.0;
    int q_lo = 0, q_hi = -1;
    std::vector<double> g;      // g[q - q_lo] = G_{20q}(e)
    bool converged = true;
    bool only_qm1_negative = true;   // sign structure flag: only G_{20,-1} < 0

    double g20(int q) const {
        if (q < q_lo || q > q_hi)
            throw std::out_of_range("HansenTable: q outside table range");
        return g[static_cast<std::size_t>(q - q_lo)];
    }
    bool covers(int lo, int hi) const { return q_lo <= lo && q_hi >= hi; }

    // D(e) = zeta * sum |G_{20q}| over a q range (callers pass zeta separately)
    double abs_sum(int lo, int hi) const {
        double s = 0.0;
        for (int q = lo; q <= hi; ++q) s += std::abs(g20(q));
        return s;
    }
};

inline constexpr int kHansenGMax = 120;   // series truncation, ample at e <= 0.45
inline constexpr int kQTriLo = -4, kQTriHi = 6;    // triaxiality index range
inline constexpr int kQTideLo = -1, kQTideHi = 7;  // tidal index range

// G_{20q}(e) = X_{q+2}^{-3,2}(e) for q in [q_lo, q_hi]. The range must cover
// Q_TRI union Q_TIDE = {-4, ..., 7}.
inline HansenTable build_g20_table(double e, int q_lo = -4, int q_hi = 7) {
    if (q_lo > kQTriLo || q_hi < kQTideHi)
        throw std::domain_error("build_g20_table: q range must cover {-4,...,7}");
    HansenTable t;
    t.e = e;
    t.q_lo = q_lo;
    t.q_hi = q_hi;
    t.g.resize(static_cast<std::size_t>(q_hi - q_lo + 1));
    for (int q = q_lo; q <= q_hi; ++q) {
        bool ok = true;
        const double v = hansen_x(q + 2, -3, 2, e, kHansenGMax, &ok);
        t.g[static_cast<std::size_t>(q - q_lo)] = v;
        if (!ok) t.converged = false;
        if (v < 0.0 && q != -1) t.only_qm1_negative = false;
    }
    return t;
}

} // namespace spinorbit
