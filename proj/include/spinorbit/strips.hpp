#pragma once

// Partition of theta_dot in [0, 5n] into type-H (Taylor stepper) and type-N
// (numerical fallback) strips, grouped into ten bands, one band per gap
// between adjacent kinks. Bounds are kept as exact integer hundredths of
// theta_dot/n so the tiling is gap-free by construction.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spinorbit {

enum class StripKind { H, N };

struct Strip {
    StripKind kind = StripKind::H;
    int lo100 = 0, hi100 = 0;      // bounds, hundredths of theta_dot/n
    int band = 0;                  // 0..9
    double lo = 0.0, hi = 0.0;     // bounds, rad/yr
    double center = 0.0;           // expansion point theta_dot_e, rad/yr (H only)
    int taylor_degree_tide = 25;   // D_TID (H only)
    int series_degree = 0;         // D_s from the band table (H only)

    double width_over_n() const { return (hi100 - lo100) / 100.0; }
};

// Per-band series degrees D_s.
inline constexpr int kBandSeriesDegree[10] = {16, 15, 15, 14, 14, 14, 15, 16, 17, 17};

struct StripLayout {
    double n = 0.0;
    std::vector<Strip> strips;     // ordered, tiling [0, 5n]

    static constexpr int outside = -1;

    // Left-closed, right-open, except the last strip which is closed.
    int locate_index(double theta_dot) const {
        if (theta_dot < strips.front().lo || theta_dot > strips.back().hi)
            return outside;
        std::size_t lo = 0, hi = strips.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (theta_dot >= strips[mid].hi)
                lo = mid + 1;
            else
                hi = mid;
        }
        return static_cast<int>(lo);
    }

    const Strip* locate(double theta_dot) const {
        const int i = locate_index(theta_dot);
        return i == outside ? nullptr : &strips[static_cast<std::size_t>(i)];
    }
};

// The default layout:
//  - N strips of half-width 0.03 about every kink (q+2)/2, q in {-1,...,7};
//  - Band 0: H strips centred on 0.1, 0.275, 0.39, 0.45 with widths
//    0.2, 0.15, 0.08, 0.04;
//  - Bands 1-8: five H strips of widths 0.03, 0.06, 0.20, 0.12, 0.03 across
//    the 0.44-wide gap between the flanking N strips;
//  - Band 9 mirrors Band 0 about its kink.
inline StripLayout default_layout(double n) {
    if (!(n > 0.0)) throw std::domain_error("default_layout: n must be positive");
    StripLayout lay;
    lay.n = n;

    auto add = [&](StripKind kind, int lo100, int hi100, int band) {
        Strip s;
        s.kind = kind;
        s.lo100 = lo100;
        s.hi100 = hi100;
        s.band = band;
        s.lo = lo100 * n / 100.0;
        s.hi = hi100 * n / 100.0;
        if (kind == StripKind::H) {
            s.center = (lo100 + hi100) * n / 200.0;
            s.series_degree = kBandSeriesDegree[band];
        }
        lay.strips.push_back(s);
    };

    // Band 0
    add(StripKind::H, 0, 20, 0);
    add(StripKind::H, 20, 35, 0);
    add(StripKind::H, 35, 43, 0);
    add(StripKind::H, 43, 47, 0);
    // Interior: N strip about kink (b+1)/2, then band b+1's five H strips.
    for (int b = 0; b < 9; ++b) {
        const int kink = 50 * (b + 1);
        add(StripKind::N, kink - 3, kink + 3, b);   // shared with band b+1
        if (b < 8) {
            const int lo = kink + 3;
            add(StripKind::H, lo, lo + 3, b + 1);
            add(StripKind::H, lo + 3, lo + 9, b + 1);
            add(StripKind::H, lo + 9, lo + 29, b + 1);
            add(StripKind::H, lo + 29, lo + 41, b + 1);
            add(StripKind::H, lo + 41, lo + 44, b + 1);
        }
    }
    // Band 9: Band 0 reflected about theta_dot/n = 4.5 + widths toward 5.0
    add(StripKind::H, 453, 457, 9);
    add(StripKind::H, 457, 465, 9);
    add(StripKind::H, 465, 480, 9);
    add(StripKind::H, 480, 500, 9);
    return lay;
}

} // namespace spinorbit
