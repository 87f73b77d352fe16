#pragma once

// Trajectory advancement: the high-order Taylor stepper (HEM) inside type-H
// strips, the Runge-Kutta fallback in type-N strips and outside [0, 5n], and
// the Poincare map that composes M = 24 sub-steps over one forcing period.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spinorbit/fasteval.hpp"
#include "spinorbit/hansen.hpp"
#include "spinorbit/model.hpp"
#include "spinorbit/rk.hpp"
#include "spinorbit/strips.hpp"
#include "spinorbit/taylor.hpp"

namespace spinorbit {

inline constexpr int kSubstepsPerPeriod = 24;   // M, so h = T0/24
inline constexpr int kMaxSeriesDegree = 17;     // largest band D_s
inline constexpr int kMaxJetLen = kMaxSeriesDegree + 2;

struct StepperConfig {
    double h = 0.0;                  // sub-step, yr (T0/24)
    double rk_abs_tol = 2e-14;
    double rk_rel_tol = 2e-14;
    double prune_threshold = 1e-16;  // cached tidal Taylor term cutoff
    bool rk_everywhere = false;      // ignore H strips (robustness comparisons)

    static StepperConfig for_params(const ModelParams& p) {
        StepperConfig c;
        c.h = p.period() / kSubstepsPerPeriod;
        return c;
    }
};

// Taylor data of a solution segment: derivative values theta^(0..Ds+1) at the
// base point (units rad * yr^-j).
struct TaylorJet {
    std::array<double, kMaxJetLen> derivs{};
    int series_degree = 0;           // D_s; derivs[0 .. D_s+1] are valid

    int length() const { return series_degree + 2; }
};

// Triaxiality sum evaluated through one complex rotation per call:
//   -sum_q zeta G_q sin(2 theta - (q+2) phi) = -Im(e^{i(2 theta + 2 phi)} P(e^{-i phi}))
// with P the polynomial whose coefficients are zeta G_{j-4}, j = 0..10.
class TriaxKernel {
public:
    TriaxKernel() = default;
    TriaxKernel(const ModelParams& p, const HansenTable& tab) {
        for (int q = kQTriLo; q <= kQTriHi; ++q)
            zg_[static_cast<std::size_t>(q - kQTriLo)] = p.zeta() * tab.g20(q);
    }

    // phi = n * t (radians)
    double accel(double theta, double phi) const {
        const double c = std::cos(phi), s = std::sin(phi);
        // P(v), v = e^{-i phi}
        double pr = zg_[10], pi = 0.0;
        for (int j = 9; j >= 0; --j) {
            const double r = pr * c + pi * s + zg_[static_cast<std::size_t>(j)];
            pi = -pr * s + pi * c;
            pr = r;
        }
        // e^{i 2 phi} = (c^2 - s^2, 2 c s)
        const double e2r = c * c - s * s, e2i = 2.0 * c * s;
        const double wr = pr * e2r - pi * e2i, wi = pr * e2i + pi * e2r;
        const double z2 = 2.0 * theta;
        return -(std::sin(z2) * wr + std::cos(z2) * wi);
    }

private:
    std::array<double, 11> zg_{};
};

// Production right-hand side: kernel triaxiality + Chebyshev tidal path.
struct OdeRhs {
    const TriaxKernel* tri = nullptr;
    const FastTide* fast = nullptr;
    double n = 0.0;
    void operator()(double t, const double y[2], double dy[2]) const {
        dy[0] = y[1];
        dy[1] = tri->accel(y[0], n * t) + accel_tide_fast(y[1], *fast);
    }
};

// Kernel triaxiality + exact (nine fractional powers) tidal sum.
struct OdeRhsExactTide {
    const TriaxKernel* tri = nullptr;
    const ModelParams* p = nullptr;
    const HansenTable* tab = nullptr;
    void operator()(double t, const double y[2], double dy[2]) const {
        dy[0] = y[1];
        dy[1] = tri->accel(y[0], p->n() * t) + accel_tide_exact(y[1], *p, *tab);
    }
};

// Plain term-by-term sums everywhere; the reference for accuracy gates.
struct OdeRhsReference {
    const ModelParams* p = nullptr;
    const HansenTable* tab = nullptr;
    void operator()(double t, const double y[2], double dy[2]) const {
        dy[0] = y[1];
        dy[1] = accel_tri(y[0], t, *p, *tab) + accel_tide_exact(y[1], *p, *tab);
    }
};

// General-purpose RK advance to an absolute target time using the fast paths.
inline State rk_step_to(const State& s, double t_target, const StepperConfig& cfg,
                        const ModelParams& p, const FastTide& fast,
                        const HansenTable& tab) {
    if (!(t_target > s.t))
        throw std::domain_error("rk_step_to: t_target must exceed state.t");
    const TriaxKernel tri(p, tab);
    Dop853<OdeRhs> rk(OdeRhs{&tri, &fast, p.n()}, cfg.rk_abs_tol, cfg.rk_rel_tol);
    double y[2] = {s.theta, s.theta_dot};
    rk.integrate(y, s.t, t_target);
    return State{y[0], y[1], t_target};
}

// High-order Taylor stepper. Per H strip it caches the degree-25 Taylor
// polynomial of the tidal acceleration about the strip centre (pruned at the
// configured threshold) together with its scaled derivative rows; per
// sub-step phase it caches the Hansen-weighted harmonic jets of the
// triaxiality sum. A step then only needs one sincos plus the jet recursion.
class HemEngine {
public:
    HemEngine(const ModelParams& p, const HansenTable& tab, const StripLayout& lay,
              const StepperConfig& cfg)
        : h_(cfg.h > 0.0 ? cfg.h : p.period() / kSubstepsPerPeriod),
          n_(p.n()),
          layout_(&lay) {
        build_phase_tables(p, tab);
        build_strip_caches(p, tab, lay, cfg);
    }

    double substep() const { return h_; }

    // Sub-step phase index from the state time; state.t must sit on the
    // sub-step grid.
    int substep_index(double t) const {
        const double r = t / h_;
        const long i = std::lround(r);
        if (std::abs(r - static_cast<double>(i)) > 1e-6)
            throw std::invalid_argument("hem: state time is not on the sub-step grid");
        return static_cast<int>(((i % kSubstepsPerPeriod) + kSubstepsPerPeriod) %
                                kSubstepsPerPeriod);
    }

    // Contract-checked single step (advances by h).
    State step(const State& s, const Strip& strip) const {
        if (strip.kind != StripKind::H)
            throw std::invalid_argument("hem: step requires a type-H strip");
        const int idx = layout_->locate_index(s.theta_dot);
        if (idx == StripLayout::outside ||
            &layout_->strips[static_cast<std::size_t>(idx)] != &strip)
            throw std::invalid_argument("hem: state lies outside the given strip");
        return step_at(s, idx, substep_index(s.t));
    }

    // Hot path: strip index and sub-step phase already known.
    State step_at(const State& s, int strip_index, int substep) const {
        double T[kMaxJetLen];
        const int Ds = expand_coeffs(s, strip_index, substep, T);
        // Horner in h^2 over even/odd parts halves the dependency chain
        const double h2 = h_ * h_;
        double te = 0.0, to = 0.0;
        int j = Ds;
        if (j % 2 == 0) {
            te = T[j];
            --j;
        }
        for (; j >= 1; j -= 2) {
            to = to * h2 + T[j];
            te = te * h2 + T[j - 1];
        }
        const double th = te + h_ * to;
        double de = 0.0, dd = 0.0;   // even-j and odd-j parts of sum j T[j] h^{j-1}
        j = Ds + 1;
        if (j % 2 == 0) {
            de = j * T[j];
            --j;
        }
        for (; j >= 1; j -= 2) {
            dd = dd * h2 + j * T[j];
            if (j >= 2) de = de * h2 + (j - 1) * T[j - 1];
        }
        const double td = dd + h_ * de;   // odd j sit on even powers of h
        return State{th, td, s.t + h_};
    }

    // Derivative values theta^(j) for inspection and tests.
    TaylorJet expand(const State& s, int strip_index, int substep) const {
        double T[kMaxJetLen];
        const int Ds = expand_coeffs(s, strip_index, substep, T);
        TaylorJet jet;
        jet.series_degree = Ds;
        double fact = 1.0;
        for (int j = 0; j <= Ds + 1; ++j) {
            jet.derivs[static_cast<std::size_t>(j)] = T[j] * fact;
            fact *= (j + 1);
        }
        return jet;
    }

private:
    struct StripCache {
        double center = 0.0;   // expansion point, rad/yr
        int Ds = 0;
        int kmax = 0;          // highest composed power of (theta_dot - V0)
        // rows k = 0..kmax of p_m * binom(m, k); Horner at y gives
        // P^(k)(center + y)/k!. Rows are pruned individually: entries of row
        // k only ever act through a factor u^k with |u| <~ 4e-3.
        std::vector<double> deriv_rows;
        std::vector<int> row_offset;
        std::vector<int> row_len;
    };

    void build_phase_tables(const ModelParams& p, const HansenTable& tab) {
        // tc[i][j] = -zeta sum_q G_q (qn)^j/j! cos(2 pi q i/M + j pi/2), ts likewise
        for (int i = 0; i < kSubstepsPerPeriod; ++i) {
            for (int j = 0; j <= kMaxSeriesDegree; ++j) tc_[i][j] = ts_[i][j] = 0.0;
            for (int q = kQTriLo; q <= kQTriHi; ++q) {
                const int m = ((q * i) % kSubstepsPerPeriod + kSubstepsPerPeriod) %
                              kSubstepsPerPeriod;
                const double ph = 2.0 * M_PI * m / kSubstepsPerPeriod;
                const double c0 = std::cos(ph), s0 = std::sin(ph);
                const double w = -p.zeta() * tab.g20(q);
                const double qn = q * p.n();
                double pw = 1.0;   // (qn)^j / j!
                for (int j = 0; j <= kMaxSeriesDegree; ++j) {
                    // cos(ph + j pi/2), sin(ph + j pi/2)
                    double cj, sj;
                    switch (j & 3) {
                        case 0: cj = c0; sj = s0; break;
                        case 1: cj = -s0; sj = c0; break;
                        case 2: cj = -c0; sj = -s0; break;
                        default: cj = s0; sj = -c0; break;
                    }
                    tc_[i][j] += w * pw * cj;
                    ts_[i][j] += w * pw * sj;
                    pw *= qn / (j + 1);
                }
            }
            // reduced 2 n t at sub-step i: 4 pi i / M mod 2 pi
            const int m2 = (2 * i) % kSubstepsPerPeriod;
            phase0_[i] = 2.0 * M_PI * m2 / kSubstepsPerPeriod;
        }
    }

    void build_strip_caches(const ModelParams& p, const HansenTable& tab,
                            const StripLayout& lay, const StepperConfig& cfg) {
        cache_.resize(lay.strips.size());
        for (std::size_t si = 0; si < lay.strips.size(); ++si) {
            const Strip& s = lay.strips[si];
            if (s.kind != StripKind::H) continue;
            StripCache& c = cache_[si];
            c.center = s.center;
            c.Ds = s.series_degree;
            const int deg = s.taylor_degree_tide;
            std::vector<double> poly(static_cast<std::size_t>(deg) + 1);
            tide_taylor_coeffs(s.center, deg, p, tab, poly.data());
            // prune: drop terms whose worst-case contribution over the strip
            // falls below the threshold
            const double hw = 0.5 * (s.hi - s.lo);
            int plen = 0;
            for (int m = 0; m <= deg; ++m)
                if (std::abs(poly[static_cast<std::size_t>(m)]) * std::pow(hw, m) >=
                    cfg.prune_threshold)
                    plen = m + 1;
            if (plen == 0) plen = 1;
            // composed-power cutoff: within a sub-step theta_dot moves by at
            // most ~|accel| h ~ 3.5e-3 rad/yr; powers whose worst-case
            // contribution to the update falls below ~3e-17 cannot matter
            const double umax = 4e-3;
            const double tiny = 3e-17 / (h_ > 0 ? h_ : 1e-2);
            int kmax = 1;
            for (int k = 1; k < plen && k <= 3; ++k) {
                double bound = 0.0;   // sup over |y| <= hw of |P^(k)/k!|
                for (int m = plen - 1; m >= k; --m)
                    bound = bound * hw +
                            std::abs(poly[static_cast<std::size_t>(m)]) * binomial_ext(m, k);
                if (bound * std::pow(umax, k) >= tiny) kmax = k;
            }
            c.kmax = kmax;
            c.row_offset.resize(static_cast<std::size_t>(kmax) + 1);
            c.row_len.resize(static_cast<std::size_t>(kmax) + 1);
            for (int k = 0; k <= kmax; ++k) {
                // per-row tail prune under the same contribution bound
                const double wk = (k == 0) ? cfg.prune_threshold
                                           : tiny / std::pow(umax, k);
                int len = 1;
                for (int m = k; m < plen; ++m)
                    if (std::abs(poly[static_cast<std::size_t>(m)]) * binomial_ext(m, k) *
                            std::pow(hw, m - k) >= wk)
                        len = m - k + 1;
                c.row_offset[static_cast<std::size_t>(k)] = static_cast<int>(c.deriv_rows.size());
                c.row_len[static_cast<std::size_t>(k)] = len;
                for (int m = k; m < k + len; ++m)
                    c.deriv_rows.push_back(poly[static_cast<std::size_t>(m)] *
                                           binomial_ext(m, k));
            }
        }
    }

    // Fills T[0..Ds+1] with the scaled Taylor coefficients theta^(j)/j! of the
    // solution through (s.theta, s.theta_dot) at sub-step phase `substep`.
    // Dispatches to a fixed-degree instantiation so the jet loops unroll.
    int expand_coeffs(const State& s, int strip_index, int substep, double* T) const {
        switch (cache_[static_cast<std::size_t>(strip_index)].Ds) {
            case 14: return expand_coeffs_t<14>(s, strip_index, substep, T);
            case 15: return expand_coeffs_t<15>(s, strip_index, substep, T);
            case 16: return expand_coeffs_t<16>(s, strip_index, substep, T);
            case 17: return expand_coeffs_t<17>(s, strip_index, substep, T);
            default: return expand_coeffs_t<0>(s, strip_index, substep, T);
        }
    }

    template <int DS>
    int expand_coeffs_t(const State& s, int strip_index, int substep, double* T) const {
        // reciprocals of j and of (j+1)(j+2), to keep divisions out of the loop
        static constexpr double inv_j[kMaxJetLen] = {
            0.0,       1.0,       1.0 / 2,  1.0 / 3,  1.0 / 4,  1.0 / 5,  1.0 / 6,
            1.0 / 7,   1.0 / 8,   1.0 / 9,  1.0 / 10, 1.0 / 11, 1.0 / 12, 1.0 / 13,
            1.0 / 14,  1.0 / 15,  1.0 / 16, 1.0 / 17, 1.0 / 18};
        static constexpr double inv_acc[kMaxJetLen] = {
            1.0 / 2,   1.0 / 6,   1.0 / 12,  1.0 / 20,  1.0 / 30,  1.0 / 42,
            1.0 / 56,  1.0 / 72,  1.0 / 90,  1.0 / 110, 1.0 / 132, 1.0 / 156,
            1.0 / 182, 1.0 / 210, 1.0 / 240, 1.0 / 272, 1.0 / 306, 1.0 / 342,
            1.0 / 380};

        const StripCache& c = cache_[static_cast<std::size_t>(strip_index)];
        const double* tc = tc_[substep];
        const double* ts = ts_[substep];
        const int Ds = (DS > 0) ? DS : c.Ds;
        const int jmax = Ds - 1;      // highest acceleration order needed

        double kw[kMaxJetLen];        // k * w[k]
        double sw[kMaxJetLen], cw[kMaxJetLen];
        double u[kMaxJetLen];
        double U[4][kMaxJetLen];      // powers of u, rows 2..3
        double qk[4];

        T[0] = s.theta;
        T[1] = s.theta_dot;
        // |w0| stays below ~4 pi (theta is kept reduced by the Poincare map)
        const double w0 = 2.0 * s.theta - phase0_[substep];
#if defined(__GLIBC__)
        ::sincos(w0, &sw[0], &cw[0]);
#else
        sw[0] = std::sin(w0);
        cw[0] = std::cos(w0);
#endif
        u[0] = 0.0;

        // shifted tidal polynomial rows at y = theta_dot - centre
        const double y = s.theta_dot - c.center;
        const int kmax = c.kmax;
        for (int k = 0; k <= kmax; ++k) {
            const double* row = c.deriv_rows.data() + c.row_offset[static_cast<std::size_t>(k)];
            const int len = c.row_len[static_cast<std::size_t>(k)];
            double v = 0.0;
            for (int m = len - 1; m >= 0; --m) v = v * y + row[m];
            qk[k] = v;
        }

        T[2] = (sw[0] * tc[0] - cw[0] * ts[0] + qk[0]) * inv_acc[0];
        for (int j = 1; j <= jmax; ++j) {
            kw[j] = (j == 1) ? 2.0 * T[1] - 2.0 * n_ : (2.0 * j) * T[j];
            // two-way split accumulators shorten the floating add chains
            double s0 = 0.0, s1 = 0.0, c0 = 0.0, c1 = 0.0;
            double a0 = sw[0] * tc[j] - cw[0] * ts[j], a1 = 0.0;
            int k = 1;
            for (; k + 1 < j; k += 2) {
                s0 += kw[k] * cw[j - k];
                c0 += kw[k] * sw[j - k];
                a0 += sw[k] * tc[j - k] - cw[k] * ts[j - k];
                s1 += kw[k + 1] * cw[j - k - 1];
                c1 += kw[k + 1] * sw[j - k - 1];
                a1 += sw[k + 1] * tc[j - k - 1] - cw[k + 1] * ts[j - k - 1];
            }
            for (; k < j; ++k) {
                s0 += kw[k] * cw[j - k];
                c0 += kw[k] * sw[j - k];
                a0 += sw[k] * tc[j - k] - cw[k] * ts[j - k];
            }
            sw[j] = ((s0 + s1) + kw[j] * cw[0]) * inv_j[j];
            cw[j] = -((c0 + c1) + kw[j] * sw[0]) * inv_j[j];
            double atri = (a0 + a1) + sw[j] * tc[0] - cw[j] * ts[0];
            u[j] = (j + 1) * T[j + 1];
            double atide = qk[1] * u[j];
            if (kmax >= 2 && j >= 2) {
                double p0 = 0.0, p1 = 0.0;
                int m = 1;
                for (; m + 1 < j; m += 2) {
                    p0 += u[m] * u[j - m];
                    p1 += u[m + 1] * u[j - m - 1];
                }
                for (; m < j; ++m) p0 += u[m] * u[j - m];
                U[2][j] = p0 + p1;
                atide += qk[2] * U[2][j];
                if (kmax >= 3 && j >= 3) {
                    double b = 0.0;
                    for (int mm = 2; mm < j; ++mm) b += U[2][mm] * u[j - mm];
                    U[3][j] = b;
                    atide += qk[3] * b;
                }
            }
            T[j + 2] = (atri + atide) * inv_acc[j];
        }
        return Ds;
    }

    double h_;
    double n_;
    const StripLayout* layout_;
    std::vector<StripCache> cache_;
    double tc_[kSubstepsPerPeriod][kMaxSeriesDegree + 1] = {};
    double ts_[kSubstepsPerPeriod][kMaxSeriesDegree + 1] = {};
    double phase0_[kSubstepsPerPeriod] = {};
};

struct IterationCounters {
    std::uint64_t h_substeps = 0;
    std::uint64_t n_substeps = 0;
    std::uint64_t outside_substeps = 0;
};

// The time-T0 advance map. Immutable and shareable across threads; walkers
// carry the per-trajectory Runge-Kutta step memory.
class PoincareMap {
public:
    PoincareMap(const ModelParams& p, const HansenTable& tab, const StripLayout& lay,
                const FastTide& fast, const StepperConfig& cfg)
        : params_(&p), table_(&tab), layout_(&lay), fast_(&fast), cfg_(cfg),
          tri_(p, tab), hem_(p, tab, lay, cfg) {
        if (cfg_.h <= 0.0) cfg_.h = p.period() / kSubstepsPerPeriod;
    }

    const StripLayout& layout() const { return *layout_; }
    const HemEngine& hem() const { return hem_; }
    const ModelParams& params() const { return *params_; }
    const StepperConfig& config() const { return cfg_; }
    double period() const { return params_->period(); }

    class Walker {
    public:
        explicit Walker(const PoincareMap& m)
            : map_(&m), rk_(OdeRhs{&m.tri_, m.fast_, m.params_->n()},
                            m.cfg_.rk_abs_tol, m.cfg_.rk_rel_tol) {}

        // One full period. state.t must be an integer multiple of T0.
        State advance(const State& s, IterationCounters* counters = nullptr) {
            const PoincareMap& m = *map_;
            const double h = m.cfg_.h;
            const double T0 = m.params_->period();
            double theta = s.theta, theta_dot = s.theta_dot;
            const int n_strips = static_cast<int>(m.layout_->strips.size());
            int prev = kUnset;
            for (int i = 0; i < kSubstepsPerPeriod; ++i) {
                // the state nearly always stays in the cached strip; re-locate
                // only when it has drifted out
                int idx;
                if (cached_idx_ >= 0 && cached_idx_ < n_strips &&
                    theta_dot >= m.layout_->strips[static_cast<std::size_t>(cached_idx_)].lo &&
                    theta_dot < m.layout_->strips[static_cast<std::size_t>(cached_idx_)].hi) {
                    idx = cached_idx_;
                } else {
                    idx = m.layout_->locate_index(theta_dot);
                    if (idx == StripLayout::outside &&
                        theta_dot > m.layout_->strips.back().hi)
                        idx = n_strips;   // above the layout; -1 means below
                    cached_idx_ = idx;
                }
                if (prev != kUnset && std::abs(idx - prev) > 1)
                    throw IntegrationError("poincare: state skipped a strip in one sub-step",
                                           theta, theta_dot, s.t + i * h);
                prev = idx;
                const bool inside = idx >= 0 && idx < n_strips;
                const Strip* strip =
                    inside ? &m.layout_->strips[static_cast<std::size_t>(idx)] : nullptr;
                if (strip && strip->kind == StripKind::H && !m.cfg_.rk_everywhere) {
                    const State r = m.hem_.step_at(State{theta, theta_dot, i * h}, idx, i);
                    theta = r.theta;
                    theta_dot = r.theta_dot;
                    if (counters) ++counters->h_substeps;
                } else {
                    double y[2] = {theta, theta_dot};
                    rk_.integrate(y, i * h, (i + 1) * h);
                    theta = y[0];
                    theta_dot = y[1];
                    if (counters) {
                        if (strip) ++counters->n_substeps;
                        else ++counters->outside_substeps;
                    }
                }
            }
            theta = std::fmod(theta, 2.0 * M_PI);
            if (theta < 0.0) theta += 2.0 * M_PI;
            return State{theta, theta_dot, s.t + T0};
        }

    private:
        static constexpr int kUnset = -1000000;
        const PoincareMap* map_;
        Dop853<OdeRhs> rk_;
        int cached_idx_ = kUnset;
    };

    Walker make_walker() const { return Walker(*this); }

    // Convenience single-shot advance (fresh walker; prefer a Walker in loops).
    State advance(const State& s, IterationCounters* counters = nullptr) const {
        Walker w(*this);
        return w.advance(s, counters);
    }

private:
    const ModelParams* params_;
    const HansenTable* table_;
    const StripLayout* layout_;
    const FastTide* fast_;
    StepperConfig cfg_;
    TriaxKernel tri_;
    HemEngine hem_;
};

} // namespace spinorbit
