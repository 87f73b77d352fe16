// Acceptance suite: one pass/fail line per criterion, pinned tolerances.
//
//   acceptance                 run criteria 1-7, 9, 10 (8 needs opting in)
//   acceptance --criterion N   run a single criterion
//   acceptance --list          list criteria
//
// Criterion 8 is the full I = 3200 Monte Carlo reproduction; it costs hours
// of multi-core CPU, so it only runs when SPINORBIT_RUN_CAMPAIGN=1 is set
// and reports a skip (exit 77) otherwise.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "spinorbit/spinorbit.hpp"
#include "spinorbit/validation.hpp"

using namespace spinorbit;

namespace {

struct World {
    ModelParams params;
    HansenTable table;
    StripLayout layout;
    FastTide fast;
    StepperConfig cfg;
    World()
        : params(),
          table(build_g20_table(0.2056)),
          layout(default_layout(params.n())),
          fast(build_fast_tide(params, table)),
          cfg(StepperConfig::for_params(params)) {}
};

const World& world() {
    static World w;
    return w;
}

struct Outcome {
    enum Kind { pass, fail, skip } kind;
    std::string detail;
};

Outcome criterion_1() {
    const GateResult g = hansen_gate(world().table, 1e-12);
    return {g.passed ? Outcome::pass : Outcome::fail, g.detail};
}

Outcome criterion_2() {
    const ModelParams& p = world().params;
    struct {
        double e, want;
    } ref[] = {{0.2056, 0.2096}, {0.3, 0.3016}, {0.4, 0.4396}};
    double worst = 0.0;
    for (const auto& r : ref) {
        const HansenTable t = build_g20_table(r.e);
        const double D = p.zeta() * t.abs_sum(kQTriLo, kQTriHi);
        worst = std::max(worst, std::abs(D - r.want));
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "max |D(e) - reference| = %.2e (tol 5e-4)", worst);
    return {worst <= 5e-4 ? Outcome::pass : Outcome::fail, buf};
}

Outcome criterion_3() {
    const ModelParams& p = world().params;
    const bool zeta_ok = std::abs(p.zeta() - 0.09545) <= 0.09545 * 5e-5 + 0.5e-5;
    const bool eta_ok = std::abs(p.eta() - 0.03096) <= 0.03096 * 5e-5 + 0.5e-5;
    char buf[120];
    std::snprintf(buf, sizeof buf, "zeta = %.6f (want 0.09545), eta = %.6f (want 0.03096)",
                  p.zeta(), p.eta());
    return {zeta_ok && eta_ok ? Outcome::pass : Outcome::fail, buf};
}

Outcome criterion_4() {
    const ModelParams& p = world().params;
    const HansenTable& t = world().table;
    // per-mode oddness is exact in floating point
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uo(-300.0, 300.0);
    double worst_odd = 0.0;
    for (int q = kQTideLo; q <= kQTideHi; ++q)
        for (int i = 0; i < 200; ++i) {
            const double w = uo(rng);
            worst_odd = std::max(worst_odd, std::abs(tide_mode_accel(q, w, p, t) +
                                                     tide_mode_accel(q, -w, p, t)));
        }
    // continuity across the 3/2 kink: the jump shrinks with delta
    const double kink = 1.5 * p.n();
    double prev = 1e300;
    bool monotone = true;
    for (double d = 1e-6; d >= 0.9e-12; d /= 10.0) {
        const double jump = std::abs(accel_tide_exact(kink + d * p.n(), p, t) -
                                     accel_tide_exact(kink - d * p.n(), p, t));
        monotone = monotone && jump < prev;
        prev = jump;
    }
    const bool cont_ok = monotone && prev < 1e-9;
    // sign pattern across kinks
    bool signs_ok = true;
    for (int twice = 1; twice <= 9; ++twice) {
        const double y = 0.5 * twice;
        const double below = accel_tide_exact((y - 1e-6) * p.n(), p, t);
        const double above = accel_tide_exact((y + 1e-6) * p.n(), p, t);
        const bool changes = (below > 0.0) != (above > 0.0);
        if ((y <= 2.5) != changes) signs_ok = false;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "oddness residual = %.1e (tol 1e-16), kink jump -> %.1e, sign "
                  "pattern %s",
                  worst_odd, prev, signs_ok ? "matches" : "WRONG");
    return {worst_odd <= 1e-16 && cont_ok && signs_ok ? Outcome::pass : Outcome::fail,
            buf};
}

Outcome criterion_5() {
    const GateResult g =
        fast_tide_gate(world().params, world().table, world().fast, 100000);
    return {g.passed ? Outcome::pass : Outcome::fail, g.detail};
}

Outcome criterion_6() {
    const GateResult g = hem_gate(world().params, world().table, world().layout,
                                  world().cfg, 250, 3e-13, 1.4e-12);
    return {g.passed ? Outcome::pass : Outcome::fail, g.detail};
}

Outcome criterion_7() {
    const World& w = world();
    // detector contract on a constant stream
    CaptureConfig cap;   // defaults: L = 10000, K = 8
    CaptureDetector det(cap, w.params.n());
    std::uint64_t fired_at = 0;
    for (std::uint64_t k = 1; k <= 100000 && fired_at == 0; ++k)
        if (det.feed(1.5 * w.params.n())) fired_at = k;
    const bool stream_ok = fired_at == 80000 && det.report().attractor_2p == 3;
    if (!stream_ok) {
        char buf[120];
        std::snprintf(buf, sizeof buf,
                      "constant stream captured at %llu (want 80000), attractor %d",
                      static_cast<unsigned long long>(fired_at),
                      det.report().attractor_2p);
        return {Outcome::fail, buf};
    }
    // the reference trajectory x0 = (0, 49 rad/yr)
    const PoincareMap map(w.params, w.table, w.layout, w.fast, w.cfg);
    CaptureDetector det2(cap, w.params.n());
    auto walker = map.make_walker();
    State s{0.0, 49.0, 0.0};
    bool captured = false;
    for (std::uint64_t k = 0; k < cap.max_iterations && !captured; ++k) {
        s = walker.advance(s);
        captured = det2.feed(s.theta_dot);
    }
    const CaptureReport& rep = det2.report();
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "constant stream ok; trajectory (0, 49): captured = %s, attractor_2p "
                  "= %d, iteration = %llu (reported, not gated)",
                  rep.captured ? "yes" : "no", rep.attractor_2p,
                  static_cast<unsigned long long>(rep.capture_iteration));
    return {rep.captured && rep.attractor_2p == 3 ? Outcome::pass : Outcome::fail, buf};
}

Outcome criterion_8() {
    if (const char* env = std::getenv("SPINORBIT_RUN_CAMPAIGN");
        env == nullptr || std::string(env) != "1")
        return {Outcome::skip,
                "I = 3200 campaign needs hours of multi-core CPU; set "
                "SPINORBIT_RUN_CAMPAIGN=1 to run it"};
    const World& w = world();
    const PoincareMap map(w.params, w.table, w.layout, w.fast, w.cfg);
    CampaignConfig cfg;
    cfg.trajectories = 3200;
    cfg.seed = 1;
    cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* wenv = std::getenv("SPINORBIT_WORKERS"))
        cfg.workers = std::atoi(wenv);
    cfg.checkpoint_path = "acceptance_campaign_checkpoint.txt";
    cfg.checkpoint_every = 32;
    const CampaignOutcome out = run_campaign(cfg, map);
    // reference probabilities (percent) with 95% intervals, I = 3200
    struct {
        int a2p;
        double p, ci;
    } ref[] = {{2, 27.44, 1.546}, {3, 43.44, 1.717}, {4, 22.03, 1.436}, {5, 5.063, 0.7596}};
    bool ok = true;
    std::string detail;
    for (const auto& r : ref) {
        const auto it = out.report.attractors.find(r.a2p);
        const double p_hat = it == out.report.attractors.end() ? 0.0 : it->second.p_hat;
        const double dp = it == out.report.attractors.end() ? 0.0 : it->second.delta_p;
        const std::uint64_t count =
            it == out.report.attractors.end() ? 0 : it->second.count;
        if (count < 100) continue;   // gate only well-populated attractors
        const double diff = std::abs(100.0 * p_hat - r.p);
        const double tol = 100.0 * dp + r.ci;
        char buf[120];
        std::snprintf(buf, sizeof buf, " %g/2: %.2f%% vs %.2f%% (tol %.2f)",
                      static_cast<double>(r.a2p), 100.0 * p_hat, r.p, tol);
        detail += buf;
        if (diff > tol) ok = false;
    }
    return {ok ? Outcome::pass : Outcome::fail, detail};
}

Outcome criterion_9() {
    const World& w = world();
    const PoincareMap map(w.params, w.table, w.layout, w.fast, w.cfg);
    const TriaxKernel tri(w.params, w.table);
    using Clock = std::chrono::steady_clock;

    auto time_hem = [&](double y0, int iters) {
        auto walker = map.make_walker();
        const State s0{0.4, y0 * w.params.n(), 0.0};
        volatile double sink = 0.0;
        const auto t0 = Clock::now();
        for (int k = 0; k < iters; ++k) sink = sink + walker.advance(s0).theta_dot;
        return std::chrono::duration<double>(Clock::now() - t0).count() / iters;
    };
    auto time_rk = [&](double y0, bool exact_tide, int reps) {
        const double h = w.cfg.h;
        double acc = 0.0;
        const auto t0 = Clock::now();
        if (exact_tide) {
            Dop853<OdeRhsExactTide> rk(OdeRhsExactTide{&tri, &w.params, &w.table},
                                       w.cfg.rk_abs_tol, w.cfg.rk_rel_tol);
            for (int k = 0; k < reps; ++k) {
                double y[2] = {0.4, y0 * w.params.n()};
                for (int i = 0; i < kSubstepsPerPeriod; ++i)
                    rk.integrate(y, i * h, (i + 1) * h);
                acc += y[1];
            }
        } else {
            Dop853<OdeRhs> rk(OdeRhs{&tri, &w.fast, w.params.n()}, w.cfg.rk_abs_tol,
                              w.cfg.rk_rel_tol);
            for (int k = 0; k < reps; ++k) {
                double y[2] = {0.4, y0 * w.params.n()};
                for (int i = 0; i < kSubstepsPerPeriod; ++i)
                    rk.integrate(y, i * h, (i + 1) * h);
                acc += y[1];
            }
        }
        volatile double sink = acc;
        (void)sink;
        return std::chrono::duration<double>(Clock::now() - t0).count() / reps;
    };

    // best-of-five repeats tame scheduler noise on a loaded machine
    auto best5 = [](auto&& f) {
        f();   // warm up caches and branch predictors
        double best = 1e300;
        for (int r = 0; r < 5; ++r) best = std::min(best, f());
        return best;
    };
    const double h_points[] = {0.1, 0.72, 1.22, 1.72, 2.22, 2.72, 3.22, 3.72, 4.22, 4.9};
    double hem_s = 0.0;
    for (double y : h_points) hem_s += best5([&] { return time_hem(y, 6000); });
    hem_s /= 10.0;
    double rk_fast_s = 0.0, rk_exact_s = 0.0;
    for (int twice = 1; twice <= 9; ++twice) {
        rk_fast_s += best5([&] { return time_rk(0.5 * twice + 0.012, false, 500); });
        rk_exact_s += best5([&] { return time_rk(0.5 * twice + 0.012, true, 200); });
    }
    rk_fast_s /= 9.0;
    rk_exact_s /= 9.0;

    double eval_exact_ns, eval_fast_ns;
    {
        const int n_eval = 400000;
        volatile double acc = 0.0;
        auto t0 = Clock::now();
        for (int i = 0; i < n_eval; ++i)
            acc = acc + accel_tide_exact(0.9 * w.params.n() + i * 1e-7, w.params, w.table);
        auto t1 = Clock::now();
        for (int i = 0; i < n_eval; ++i)
            acc = acc + accel_tide_fast(0.9 * w.params.n() + i * 1e-7, w.fast);
        auto t2 = Clock::now();
        eval_exact_ns = std::chrono::duration<double>(t1 - t0).count() / n_eval * 1e9;
        eval_fast_ns = std::chrono::duration<double>(t2 - t1).count() / n_eval * 1e9;
    }

    const double r1 = rk_fast_s / hem_s;
    const double r2 = rk_exact_s / rk_fast_s;
    const double r3 = eval_exact_ns / eval_fast_ns;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "rk-fast/hem = %.1f (floor 10), rk-exact/rk-fast = %.2f (floor 2), "
                  "tide exact/fast = %.2f (floor 3)",
                  r1, r2, r3);
    return {r1 >= 10.0 && r2 >= 2.0 && r3 >= 3.0 ? Outcome::pass : Outcome::fail, buf};
}

Outcome criterion_10() {
    const World& w = world();
    const PoincareMap map(w.params, w.table, w.layout, w.fast, w.cfg);
    CampaignConfig cfg;
    cfg.trajectories = 8;
    cfg.seed = 99;
    cfg.capture.L = 2000;
    cfg.capture.K = 3;
    cfg.capture.max_iterations = 30000;
    cfg.calibrate_timings = false;
    cfg.workers = 1;
    const CampaignOutcome a = run_campaign(cfg, map);
    cfg.workers = 8;
    const CampaignOutcome b = run_campaign(cfg, map);
    bool same = a.results.size() == b.results.size();
    for (std::size_t i = 0; same && i < a.results.size(); ++i) {
        same = a.results[i].theta0 == b.results[i].theta0 &&
               a.results[i].theta_dot0 == b.results[i].theta_dot0 &&
               a.results[i].captured == b.results[i].captured &&
               a.results[i].attractor_2p == b.results[i].attractor_2p &&
               a.results[i].capture_iteration == b.results[i].capture_iteration &&
               a.results[i].final_theta_dot == b.results[i].final_theta_dot;
    }
    return {same ? Outcome::pass : Outcome::fail,
            same ? "workers 1 and 8 produced identical per-trajectory outcomes"
                 : "outcomes differ between worker counts"};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "Hansen table vs Kepler quadrature", criterion_1},
    {2, "triaxiality magnitude D(e)", criterion_2},
    {3, "derived constants zeta and eta", criterion_3},
    {4, "tidal oddness, continuity, sign pattern", criterion_4},
    {5, "fast tidal path error and power count", criterion_5},
    {6, "Taylor-stepper error gate", criterion_6},
    {7, "capture detector and reference trajectory", criterion_7},
    {8, "reduced-scale Monte Carlo probabilities", criterion_8},
    {9, "performance floors", criterion_9},
    {10, "parallel determinism", criterion_10},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--list") == 0) {
            for (const auto& c : kCriteria) std::printf("%2d  %s\n", c.id, c.name);
            return 0;
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion N | --list]\n");
            return 2;
        }
    }
    int failures = 0, skips = 0, ran = 0;
    for (const auto& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        ++ran;
        const Outcome o = c.run();
        const char* tag = o.kind == Outcome::pass ? "PASS"
                          : o.kind == Outcome::fail ? "FAIL"
                                                    : "SKIP";
        std::printf("[%s] criterion %d: %s -- %s\n", tag, c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
        if (o.kind == Outcome::fail) ++failures;
        if (o.kind == Outcome::skip) ++skips;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no such criterion: %d\n", only);
        return 2;
    }
    if (failures > 0) return 1;
    if (skips == ran) return 77;   // everything requested was skipped
    return 0;
}
