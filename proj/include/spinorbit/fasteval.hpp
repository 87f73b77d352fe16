#pragma once

// Fast tidal acceleration: Chebyshev fits far from kinks (Case 1) and exact
// own-kink mode plus a low-degree remainder fit near kinks (Case 2), so at
// most one fractional power is computed per evaluation.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "spinorbit/chebyshev.hpp"
#include "spinorbit/hansen.hpp"
#include "spinorbit/model.hpp"

namespace spinorbit {

namespace detail {
// Out-of-domain fast-path evaluations that fell back to the exact sum.
inline thread_local std::uint64_t fast_tide_fallback_count = 0;
} // namespace detail

struct FastTide {
    // Case 2 activates iff |2 theta_dot/n - round(.)| < kink_halfwidth.
    static constexpr double kink_halfwidth = 0.08;
    static constexpr int global_degree = 25;
    static constexpr int remainder_degree = 7;
    static constexpr double max_abs_error = 4e-14;   // construction-verified bound

    double n = 0.0;
    double domain_lo = 0.0, domain_hi = 0.0;         // covered theta_dot range
    std::vector<ChebFit> global_fits;                // Case 1, ordered by interval
    struct KinkFit {
        int twice_ratio = 0;    // round(2 theta_dot / n) for this zone
        int q = 0;              // own mode index, or INT_MIN when none in Q_TIDE
        bool has_mode = false;
        ChebFit remainder;      // fit of (exact - own mode) over the zone
    };
    std::vector<KinkFit> near_kink_fits;             // ordered by twice_ratio
    ModelParams params;                              // for the exact own-mode term
    HansenTable table;

    bool case2(double theta_dot) const {
        const double y = 2.0 * theta_dot / n;
        return std::abs(y - std::nearbyint(y)) < kink_halfwidth;
    }
    bool in_domain(double theta_dot) const {
        return theta_dot >= domain_lo && theta_dot <= domain_hi;
    }
};

namespace detail {

// Case-1 segment edges over one kink-free gap: bisect until each segment is
// comfortably inside its Bernstein ellipse (half-width <= 0.55 x distance to
// the nearest kink), which leaves the degree-25 fit far below the 4e-14 gate.
inline void split_segment(double lo, double hi, const std::vector<double>& kinks,
                          std::vector<std::pair<double, double>>& out) {
    const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    double dist = 1e300;
    for (double k : kinks) dist = std::min(dist, std::abs(c - k));
    if (hw <= 0.55 * dist || hw < 0.01) {
        out.emplace_back(lo, hi);
        return;
    }
    split_segment(lo, c, kinks, out);
    split_segment(c, hi, kinks, out);
}

} // namespace detail

// Build the fits and verify the 4e-14 bound on a dense grid (>= 1e4 points
// per sub-interval); throws reporting the worst point on violation.
inline FastTide build_fast_tide(const ModelParams& p, const HansenTable& tab,
                                double domain_lo_over_n = -1.5,
                                double domain_hi_over_n = 5.5) {
    FastTide f;
    f.n = p.n();
    f.params = p;
    f.table = tab;
    f.domain_lo = domain_lo_over_n * p.n();
    f.domain_hi = domain_hi_over_n * p.n();

    const auto exact = [&](double td) { return accel_tide_exact(td, p, tab); };

    // Kinks sit at theta_dot/n = (q+2)/2 for q in Q_TIDE.
    std::vector<double> kinks;
    for (int q = kQTideLo; q <= kQTideHi; ++q) kinks.push_back(0.5 * (q + 2));

    // Case-2 zones around every half-integer of theta_dot/n inside the domain.
    const double hw2 = FastTide::kink_halfwidth / 2.0;   // in theta_dot/n units
    const int r_lo = static_cast<int>(std::ceil(2.0 * domain_lo_over_n));
    const int r_hi = static_cast<int>(std::floor(2.0 * domain_hi_over_n));
    for (int r = r_lo; r <= r_hi; ++r) {
        FastTide::KinkFit kf;
        kf.twice_ratio = r;
        kf.q = r - 2;
        kf.has_mode = (kf.q >= kQTideLo && kf.q <= kQTideHi);
        const double zlo = (0.5 * r - hw2) * p.n();
        const double zhi = (0.5 * r + hw2) * p.n();
        const int q = kf.q;
        const bool has = kf.has_mode;
        kf.remainder = ChebFit::fit(
            [&](double td) {
                double v = exact(td);
                if (has) v -= tide_mode_accel(q, mode_frequency(q, p.n(), td), p, tab);
                return v;
            },
            zlo, zhi, FastTide::remainder_degree);
        f.near_kink_fits.push_back(std::move(kf));
    }

    // Case-1 segments: the gaps between consecutive zones.
    std::vector<std::pair<double, double>> gaps;
    double cur = domain_lo_over_n;
    for (int r = r_lo; r <= r_hi; ++r) {
        const double zlo = 0.5 * r - hw2;
        if (zlo > cur) gaps.emplace_back(cur, zlo);
        cur = 0.5 * r + hw2;
    }
    if (cur < domain_hi_over_n) gaps.emplace_back(cur, domain_hi_over_n);

    std::vector<std::pair<double, double>> segs;
    for (const auto& [lo, hi] : gaps) detail::split_segment(lo, hi, kinks, segs);
    for (const auto& [lo, hi] : segs)
        f.global_fits.push_back(
            ChebFit::fit(exact, lo * p.n(), hi * p.n(), FastTide::global_degree));

    // Verification sweep.
    double worst = 0.0, worst_at = 0.0;
    const auto check = [&](double lo, double hi, const auto& approx) {
        const int m = 10000;
        for (int i = 0; i <= m; ++i) {
            const double td = lo + (hi - lo) * i / m;
            const double err = std::abs(approx(td) - exact(td));
            if (err > worst) {
                worst = err;
                worst_at = td;
            }
        }
    };
    for (const auto& c : f.global_fits)
        check(c.lo, c.hi, [&](double td) { return c.eval(td); });
    for (const auto& kf : f.near_kink_fits)
        check(kf.remainder.lo, kf.remainder.hi, [&](double td) {
            double v = kf.remainder.eval(td);
            if (kf.has_mode)
                v += tide_mode_accel(kf.q, mode_frequency(kf.q, p.n(), td), p, tab);
            return v;
        });
    if (worst > FastTide::max_abs_error) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "build_fast_tide: error bound violated: %.3e at theta_dot/n = %.9f",
                      worst, worst_at / p.n());
        throw std::runtime_error(buf);
    }
    return f;
}

// Fast evaluation. Outside the covered domain falls back to the exact sum
// (counted in detail::fast_tide_fallback_count).
inline double accel_tide_fast(double theta_dot, const FastTide& f) {
    if (!f.in_domain(theta_dot)) {
        ++detail::fast_tide_fallback_count;
        return accel_tide_exact(theta_dot, f.params, f.table);
    }
    const double y = 2.0 * theta_dot / f.n;
    const double r = std::nearbyint(y);
    if (std::abs(y - r) < FastTide::kink_halfwidth) {
        const int ri = static_cast<int>(r);
        // zones are contiguous in twice_ratio
        const auto& kf =
            f.near_kink_fits[static_cast<std::size_t>(ri - f.near_kink_fits.front().twice_ratio)];
        double v = kf.remainder.eval(theta_dot);
        if (kf.has_mode) {
            const double omega = mode_frequency(kf.q, f.n, theta_dot);
            v += tide_mode_accel(kf.q, omega, f.params, f.table);
        }
        return v;
    }
    // binary search over Case-1 segments
    std::size_t lo = 0, hi = f.global_fits.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (theta_dot > f.global_fits[mid].hi)
            lo = mid + 1;
        else
            hi = mid;
    }
    return f.global_fits[lo].eval(theta_dot);
}

// --- binary cache -----------------------------------------------------------
// Layout: magic, key hash over (params, table), then the fit payload.

namespace detail {

inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ull) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fast_tide_key(const ModelParams& p, const HansenTable& t) {
    std::uint64_t h = fnv1a(&p.raw(), sizeof(PhysicalParams));
    h = fnv1a(t.g.data(), t.g.size() * sizeof(double), h);
    h = fnv1a(&t.q_lo, sizeof t.q_lo, h);
    return h;
}

} // namespace detail

inline void save_fast_tide(const FastTide& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_fast_tide: cannot open " + path);
    const std::uint64_t magic = 0x53504e4f54494445ull;
    const std::uint64_t key = detail::fast_tide_key(f.params, f.table);
    auto put = [&](const void* p, std::size_t len) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
    };
    put(&magic, 8);
    put(&key, 8);
    const std::uint64_t ng = f.global_fits.size(), nk = f.near_kink_fits.size();
    put(&ng, 8);
    put(&nk, 8);
    auto put_fit = [&](const ChebFit& c) {
        put(&c.lo, 8);
        put(&c.hi, 8);
        const std::uint64_t m = c.coeffs.size();
        put(&m, 8);
        put(c.coeffs.data(), m * 8);
    };
    for (const auto& c : f.global_fits) put_fit(c);
    for (const auto& kf : f.near_kink_fits) {
        const std::int64_t tr = kf.twice_ratio, q = kf.q;
        const std::uint64_t hm = kf.has_mode ? 1 : 0;
        put(&tr, 8);
        put(&q, 8);
        put(&hm, 8);
        put_fit(kf.remainder);
    }
    put(&f.domain_lo, 8);
    put(&f.domain_hi, 8);
}

// Returns false (without touching `f`) when the file is missing or was built
// for different parameters; the caller then rebuilds.
inline bool load_fast_tide(FastTide& f, const std::string& path,
                           const ModelParams& p, const HansenTable& tab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    auto get = [&](void* q, std::size_t len) {
        in.read(static_cast<char*>(q), static_cast<std::streamsize>(len));
        return bool(in);
    };
    std::uint64_t magic = 0, key = 0, ng = 0, nk = 0;
    if (!get(&magic, 8) || magic != 0x53504e4f54494445ull) return false;
    if (!get(&key, 8) || key != detail::fast_tide_key(p, tab)) return false;
    if (!get(&ng, 8) || !get(&nk, 8)) return false;
    FastTide r;
    r.n = p.n();
    r.params = p;
    r.table = tab;
    auto get_fit = [&](ChebFit& c) {
        std::uint64_t m = 0;
        if (!get(&c.lo, 8) || !get(&c.hi, 8) || !get(&m, 8) || m > 4096) return false;
        c.coeffs.resize(m);
        return get(c.coeffs.data(), m * 8);
    };
    r.global_fits.resize(ng);
    for (auto& c : r.global_fits)
        if (!get_fit(c)) return false;
    r.near_kink_fits.resize(nk);
    for (auto& kf : r.near_kink_fits) {
        std::int64_t tr = 0, q = 0;
        std::uint64_t hm = 0;
        if (!get(&tr, 8) || !get(&q, 8) || !get(&hm, 8)) return false;
        kf.twice_ratio = static_cast<int>(tr);
        kf.q = static_cast<int>(q);
        kf.has_mode = hm != 0;
        if (!get_fit(kf.remainder)) return false;
    }
    if (!get(&r.domain_lo, 8) || !get(&r.domain_hi, 8)) return false;
    f = std::move(r);
    return true;
}

} // namespace spinorbit
