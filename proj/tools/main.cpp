// Command-line front end: table dumps, single trajectories, validation gates,
// benchmarks, and Monte Carlo capture campaigns.
//
// Exit codes: 0 success, 1 validation failure, 2 domain/config error,
// 3 integration failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinorbit/spinorbit.hpp"
#include "spinorbit/validation.hpp"

using nlohmann::json;
using namespace spinorbit;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp_utc() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Everything needed to reproduce a run; echoed into every output file.
struct RunManifest {
    std::string subcommand;
    std::string params_file;
    std::vector<std::pair<std::string, std::string>> settings;
    std::uint64_t seed = 0;
    std::string out;
    std::string timestamp;

    void set(const std::string& k, const std::string& v) { settings.emplace_back(k, v); }
    void set(const std::string& k, double v) { settings.emplace_back(k, fmt17(v)); }
    void set(const std::string& k, std::uint64_t v) {
        settings.emplace_back(k, std::to_string(v));
    }
    void set(const std::string& k, int v) { settings.emplace_back(k, std::to_string(v)); }

    void write_csv_header(std::ostream& os) const {
        os << "# spinorbit " << subcommand << "\n";
        os << "# manifest: timestamp=" << timestamp << " seed=" << seed
           << " params=" << (params_file.empty() ? "builtin" : params_file)
           << " out=" << out << "\n";
        for (const auto& [k, v] : settings) os << "# manifest: " << k << "=" << v << "\n";
    }

    json to_json() const {
        json j;
        j["subcommand"] = subcommand;
        j["params"] = params_file.empty() ? "builtin" : params_file;
        j["seed"] = seed;
        j["out"] = out;
        j["timestamp"] = timestamp;
        for (const auto& [k, v] : settings) j["settings"][k] = v;
        return j;
    }
};

PhysicalParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open parameter file: " + path);
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::domain_error(path + ":" + std::to_string(lineno) +
                                    ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            kv[key] = std::stod(val);
        } catch (const std::exception&) {
            throw std::domain_error(path + ":" + std::to_string(lineno) +
                                    ": bad numeric value '" + val + "'");
        }
    }
    return parse_params(kv);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::domain_error("cannot open output file: " + path);
    out.precision(17);
    return out;
}

struct CommonOpts {
    std::string params_file;
    std::optional<double> e_override;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
    std::optional<long> cap_L;
    std::optional<int> cap_K;
    std::optional<double> cap_eps_i, cap_eps_m;
    std::optional<std::uint64_t> max_iters;

    ModelParams make_params() const {
        PhysicalParams raw =
            params_file.empty() ? PhysicalParams{} : load_params_file(params_file);
        if (e_override) raw.e = *e_override;
        return ModelParams(raw);
    }
    CaptureConfig make_capture() const {
        CaptureConfig c;
        if (cap_L) c.L = *cap_L;
        if (cap_K) c.K = *cap_K;
        if (cap_eps_i) c.eps_i = *cap_eps_i;
        if (cap_eps_m) c.eps_m = *cap_eps_m;
        if (max_iters) c.max_iterations = *max_iters;
        c.validate();
        return c;
    }
    void fill(RunManifest& m, const std::string& sub) const {
        m.subcommand = sub;
        m.params_file = params_file;
        m.seed = seed;
        m.out = out;
        m.timestamp = timestamp_utc();
        if (e_override) m.set("e_override", *e_override);
    }
};

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--params", o.params_file, "parameter file (key = value, Table-1 names)");
    app->add_option("--e", o.e_override, "override the orbital eccentricity");
    app->add_option("--seed", o.seed, "random seed");
    app->add_option("--workers", o.workers, "worker threads");
    app->add_option("--out", o.out, "output path");
    app->add_option("--max-iters", o.max_iters, "iteration cap per trajectory");
    app->add_option("--capture-L", o.cap_L, "capture block length");
    app->add_option("--capture-K", o.cap_K, "successive passing blocks");
    app->add_option("--capture-eps-i", o.cap_eps_i, "mean-proximity threshold");
    app->add_option("--capture-eps-m", o.cap_eps_m, "gradient threshold");
}

// --- subcommands -------------------------------------------------------------

int cmd_hansen(const CommonOpts& o, int q_lo, int q_hi) {
    const ModelParams p = o.make_params();
    const HansenTable t = build_g20_table(p.e(), q_lo, q_hi);
    RunManifest m;
    o.fill(m, "hansen");
    m.set("e", p.e());
    m.set("q_lo", q_lo);
    m.set("q_hi", q_hi);
    const std::string path = o.out.empty() ? "hansen.csv" : o.out;
    std::ofstream out = open_out(path);
    m.write_csv_header(out);
    out << "q,G20q,log10_abs_G20q\n";
    for (int q = q_lo; q <= q_hi; ++q) {
        const double g = t.g20(q);
        out << q << "," << fmt17(g) << ",";
        if (g != 0.0) out << fmt17(std::log10(std::abs(g)));
        out << "\n";
    }
    std::cout << "wrote " << path << " (" << (q_hi - q_lo + 1) << " rows)\n";
    return 0;
}

int cmd_tide_dump(const CommonOpts& o, double lo_over_n, double hi_over_n, int samples) {
    const ModelParams p = o.make_params();
    const HansenTable t = build_g20_table(p.e());
    RunManifest m;
    o.fill(m, "tide-dump");
    m.set("lo_over_n", lo_over_n);
    m.set("hi_over_n", hi_over_n);
    m.set("samples", static_cast<std::uint64_t>(samples));
    const std::string path = o.out.empty() ? "tide.csv" : o.out;
    std::ofstream out = open_out(path);
    m.write_csv_header(out);
    out << "theta_dot_over_n,accel_tide,accel_tide_deriv\n";
    for (int i = 0; i <= samples; ++i) {
        const double y = lo_over_n + (hi_over_n - lo_over_n) * i / samples;
        const double td = y * p.n();
        out << fmt17(y) << "," << fmt17(accel_tide_exact(td, p, t)) << ",";
        try {
            out << fmt17(accel_tide_deriv(td, p, t));
        } catch (const std::domain_error&) {
            // derivative undefined exactly on a kink; leave the cell empty
        }
        out << "\n";
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_layout_dump(const CommonOpts& o) {
    const ModelParams p = o.make_params();
    const StripLayout lay = default_layout(p.n());
    RunManifest m;
    o.fill(m, "layout-dump");
    json j;
    j["manifest"] = m.to_json();
    j["n"] = lay.n;
    j["strips"] = json::array();
    for (const auto& s : lay.strips) {
        json js;
        js["kind"] = s.kind == StripKind::H ? "H" : "N";
        js["band"] = s.band;
        js["lo_over_n"] = s.lo100 / 100.0;
        js["hi_over_n"] = s.hi100 / 100.0;
        if (s.kind == StripKind::H) {
            js["center"] = s.center;
            js["series_degree"] = s.series_degree;
            js["taylor_degree_tide"] = s.taylor_degree_tide;
        }
        j["strips"].push_back(js);
    }
    if (o.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out = open_out(o.out);
        out << j.dump(2) << "\n";
        std::cout << "wrote " << o.out << "\n";
    }
    return 0;
}

int cmd_traj(const CommonOpts& o, double theta0, double thetadot0,
             std::uint64_t iters, std::uint64_t stride, const std::string& tide_cache) {
    const ModelParams p = o.make_params();
    const HansenTable t = build_g20_table(p.e());
    const StripLayout lay = default_layout(p.n());
    FastTide fast;
    if (tide_cache.empty() || !load_fast_tide(fast, tide_cache, p, t)) {
        fast = build_fast_tide(p, t);
        if (!tide_cache.empty()) save_fast_tide(fast, tide_cache);
    }
    const StepperConfig cfg = StepperConfig::for_params(p);
    const PoincareMap map(p, t, lay, fast, cfg);
    const CaptureConfig cap = o.make_capture();

    RunManifest m;
    o.fill(m, "traj");
    m.set("theta0", theta0);
    m.set("thetadot0", thetadot0);
    m.set("iters", iters);
    m.set("stride", stride);
    m.set("capture_L", static_cast<std::uint64_t>(cap.L));
    m.set("capture_K", cap.K);
    m.set("capture_eps_i", cap.eps_i);
    m.set("capture_eps_m", cap.eps_m);
    m.set("max_iterations", cap.max_iterations);

    const std::string path = o.out.empty() ? "traj.csv" : o.out;
    std::ofstream out = open_out(path);
    m.write_csv_header(out);
    out << "k,theta,theta_dot\n";
    out << 0 << "," << fmt17(theta0) << "," << fmt17(thetadot0) << "\n";

    CaptureDetector det(cap, p.n());
    auto w = map.make_walker();
    State s{theta0, thetadot0, 0.0};
    const std::uint64_t cap_iters = std::min<std::uint64_t>(iters, cap.max_iterations);
    try {
        for (std::uint64_t k = 1; k <= cap_iters; ++k) {
            s = w.advance(s);
            if (stride > 0 && k % stride == 0)
                out << k << "," << fmt17(s.theta) << "," << fmt17(s.theta_dot) << "\n";
            if (det.feed(s.theta_dot)) break;
        }
    } catch (const IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << "\n";
        return 3;
    }
    const CaptureReport& rep = det.report();
    if (rep.captured)
        std::cout << "captured: attractor_2p = " << rep.attractor_2p
                  << " (mean theta_dot/n ~ " << rep.attractor_2p / 2.0 << ") at iteration "
                  << rep.capture_iteration << " (" << rep.blocks_processed << " blocks)\n";
    else
        std::cout << "not captured within " << det.samples() << " iterations ("
                  << rep.blocks_processed << " blocks)\n";
    return 0;
}

int cmd_campaign(const CommonOpts& o, std::uint64_t I, const std::string& tide_cache,
                 std::uint64_t checkpoint_every, const std::string& checkpoint,
                 bool no_calibration, bool rk_everywhere) {
    const ModelParams p = o.make_params();
    const HansenTable t = build_g20_table(p.e());
    const StripLayout lay = default_layout(p.n());
    FastTide fast;
    if (tide_cache.empty() || !load_fast_tide(fast, tide_cache, p, t)) {
        fast = build_fast_tide(p, t);
        if (!tide_cache.empty()) save_fast_tide(fast, tide_cache);
    }
    StepperConfig scfg = StepperConfig::for_params(p);
    scfg.rk_everywhere = rk_everywhere;
    const PoincareMap map(p, t, lay, fast, scfg);

    CampaignConfig cfg;
    cfg.trajectories = I;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.capture = o.make_capture();
    cfg.calibrate_timings = !no_calibration;
    cfg.checkpoint_every = checkpoint_every;
    cfg.checkpoint_path = checkpoint;

    RunManifest m;
    o.fill(m, "campaign");
    m.set("I", I);
    m.set("capture_L", static_cast<std::uint64_t>(cfg.capture.L));
    m.set("capture_K", cfg.capture.K);
    m.set("capture_eps_i", cfg.capture.eps_i);
    m.set("capture_eps_m", cfg.capture.eps_m);
    m.set("max_iterations", cfg.capture.max_iterations);
    m.set("workers", cfg.workers);
    if (rk_everywhere) m.set("rk_everywhere", std::uint64_t{1});

    const std::string base = o.out.empty() ? "campaign" : o.out;
    auto progress = [](std::uint64_t done, std::uint64_t total) {
        if (done % 64 == 0 || done == total)
            std::fprintf(stderr, "\r%llu / %llu trajectories",
                         static_cast<unsigned long long>(done),
                         static_cast<unsigned long long>(total));
        if (done == total) std::fprintf(stderr, "\n");
        return true;
    };
    const CampaignOutcome out = run_campaign(cfg, map, progress);

    {
        std::ofstream csv = open_out(base + ".csv");
        m.write_csv_header(csv);
        csv << "index,theta0,theta_dot0,captured,attractor_2p,capture_iteration,cpu_sec\n";
        for (const auto& r : out.results)
            csv << r.index << "," << fmt17(r.theta0) << "," << fmt17(r.theta_dot0) << ","
                << (r.captured ? 1 : 0) << "," << r.attractor_2p << ","
                << r.capture_iteration << "," << fmt17(r.cpu_sec) << "\n";
    }
    {
        const ProbabilityReport& rep = out.report;
        json j;
        j["manifest"] = m.to_json();
        j["config"] = {{"I", cfg.trajectories},
                       {"seed", cfg.seed},
                       {"workers", cfg.workers},
                       {"capture",
                        {{"L", cfg.capture.L},
                         {"K", cfg.capture.K},
                         {"eps_i", cfg.capture.eps_i},
                         {"eps_m", cfg.capture.eps_m},
                         {"max_iterations", cfg.capture.max_iterations}}}};
        j["attractors"] = json::array();
        for (const auto& [a, st] : rep.attractors)
            j["attractors"].push_back({{"attractor_2p", a},
                                       {"resonance", a / 2.0},
                                       {"count", st.count},
                                       {"p_hat", st.p_hat},
                                       {"delta_p_95", st.delta_p}});
        j["uncaptured"] = rep.uncaptured;
        j["failed"] = rep.failed;
        j["timing_cpu_sec"] = {{"mean", rep.time_mean},
                               {"sd", rep.time_sd},
                               {"min", rep.time_min},
                               {"max", rep.time_max}};
        j["timing_histogram"] = {{"bin_width_cpu_sec", ProbabilityReport::histogram_bin},
                                 {"counts", rep.time_histogram}};
        j["iterations"] = {{"h_substeps", rep.totals.h_substeps},
                           {"n_substeps", rep.totals.n_substeps},
                           {"outside_substeps", rep.totals.outside_substeps}};
        std::ofstream jf = open_out(base + ".json");
        jf << j.dump(2) << "\n";
    }
    std::cout << "wrote " << base << ".json and " << base << ".csv\n";
    for (const auto& [a, st] : out.report.attractors)
        std::printf("  attractor %4.1f: %7llu  p = %.4f%% +- %.4f%%\n", a / 2.0,
                    static_cast<unsigned long long>(st.count), 100.0 * st.p_hat,
                    100.0 * st.delta_p);
    if (out.report.uncaptured)
        std::printf("  uncaptured: %llu\n",
                    static_cast<unsigned long long>(out.report.uncaptured));
    if (out.report.failed)
        std::printf("  failed: %llu\n", static_cast<unsigned long long>(out.report.failed));
    return out.report.failed == 0 ? 0 : 3;
}

int cmd_validate(const CommonOpts& o, int hem_samples) {
    const ModelParams p = o.make_params();
    const HansenTable t = build_g20_table(p.e());
    const StripLayout lay = default_layout(p.n());
    const FastTide fast = build_fast_tide(p, t);
    const StepperConfig cfg = StepperConfig::for_params(p);

    std::vector<GateResult> gates;
    gates.push_back(hansen_gate(t));
    gates.push_back(fast_tide_gate(p, t, fast));
    gates.push_back(hem_gate(p, t, lay, cfg, hem_samples));
    bool all = true;
    for (const auto& g : gates) {
        std::printf("[%s] %-10s %s\n", g.passed ? "PASS" : "FAIL", g.name.c_str(),
                    g.detail.c_str());
        all = all && g.passed;
    }
    return all ? 0 : 1;
}

int cmd_bench(const CommonOpts& o, int iters) {
    const ModelParams p = o.make_params();
    const HansenTable t = build_g20_table(p.e());
    const StripLayout lay = default_layout(p.n());
    const FastTide fast = build_fast_tide(p, t);
    const StepperConfig cfg = StepperConfig::for_params(p);
    const PoincareMap map(p, t, lay, fast, cfg);
    const TriaxKernel tri(p, t);

    const double cal1 = cpu_sec_calibrate();
    using Clock = std::chrono::steady_clock;

    // mean time per map iteration from states pinned inside H strips
    auto time_hem = [&](double y0) {
        auto w = map.make_walker();
        const State s0{0.4, y0 * p.n(), 0.0};
        volatile double sink = 0.0;
        const auto t0 = Clock::now();
        for (int k = 0; k < iters; ++k) sink = sink + w.advance(s0).theta_dot;
        return std::chrono::duration<double>(Clock::now() - t0).count() / iters;
    };
    // Runge-Kutta over one period (24 sub-steps) from states pinned in N strips
    auto time_rk = [&](double y0, bool exact_tide) {
        const double h = cfg.h;
        double acc = 0.0;
        const int reps = std::max(1, iters / 8);
        const auto t0 = Clock::now();
        if (exact_tide) {
            Dop853<OdeRhsExactTide> rk(OdeRhsExactTide{&tri, &p, &t}, cfg.rk_abs_tol,
                                       cfg.rk_rel_tol);
            for (int k = 0; k < reps; ++k) {
                double y[2] = {0.4, y0 * p.n()};
                for (int i = 0; i < kSubstepsPerPeriod; ++i)
                    rk.integrate(y, i * h, (i + 1) * h);
                acc += y[1];
            }
        } else {
            Dop853<OdeRhs> rk(OdeRhs{&tri, &fast, p.n()}, cfg.rk_abs_tol, cfg.rk_rel_tol);
            for (int k = 0; k < reps; ++k) {
                double y[2] = {0.4, y0 * p.n()};
                for (int i = 0; i < kSubstepsPerPeriod; ++i)
                    rk.integrate(y, i * h, (i + 1) * h);
                acc += y[1];
            }
        }
        volatile double sink = acc;
        (void)sink;
        return std::chrono::duration<double>(Clock::now() - t0).count() / reps;
    };

    double hem_s = 0.0;
    const double h_points[] = {0.1, 0.72, 1.22, 1.72, 2.22, 2.72, 3.22, 3.72, 4.22, 4.9};
    for (double y : h_points) hem_s += time_hem(y);
    hem_s /= 10.0;
    double rk_fast_s = 0.0, rk_exact_s = 0.0;
    for (int twice = 1; twice <= 9; ++twice) {
        rk_fast_s += time_rk(0.5 * twice + 0.012, false);
        rk_exact_s += time_rk(0.5 * twice + 0.012, true);
    }
    rk_fast_s /= 9.0;
    rk_exact_s /= 9.0;

    // single-evaluation tidal ratio
    double eval_exact_ns, eval_fast_ns;
    {
        const int n_eval = 200000;
        volatile double acc = 0.0;
        auto t0 = Clock::now();
        for (int i = 0; i < n_eval; ++i)
            acc = acc + accel_tide_exact(0.9 * p.n() + i * 1e-7, p, t);
        auto t1 = Clock::now();
        for (int i = 0; i < n_eval; ++i)
            acc = acc + accel_tide_fast(0.9 * p.n() + i * 1e-7, fast);
        auto t2 = Clock::now();
        eval_exact_ns = std::chrono::duration<double>(t1 - t0).count() / n_eval * 1e9;
        eval_fast_ns = std::chrono::duration<double>(t2 - t1).count() / n_eval * 1e9;
    }

    const double cal2 = cpu_sec_calibrate();
    const double cal = 0.5 * (cal1 + cal2);

    const double scale = 1e5 / cal;   // seconds -> CPU-sec per 1e5 iterations
    std::printf("calibration: 1 CPU-sec = %.4f s (consecutive runs %.4f / %.4f, "
                "drift %.1f%%)\n",
                cal, cal1, cal2, 100.0 * std::abs(cal1 - cal2) / cal);
    std::printf("%-34s %12s %18s\n", "method", "us/iteration", "CPU-sec per 1e5 it");
    std::printf("%-34s %12.3f %18.3f\n", "Taylor stepper (H strips)", hem_s * 1e6,
                hem_s * scale);
    std::printf("%-34s %12.3f %18.3f\n", "Runge-Kutta, fast tide (N strips)",
                rk_fast_s * 1e6, rk_fast_s * scale);
    std::printf("%-34s %12.3f %18.3f\n", "Runge-Kutta, exact tide (N strips)",
                rk_exact_s * 1e6, rk_exact_s * scale);
    std::printf("ratios: rk-fast/hem = %.1f, rk-exact/rk-fast = %.2f, "
                "tide exact/fast single eval = %.2f (%.0f ns / %.0f ns)\n",
                rk_fast_s / hem_s, rk_exact_s / rk_fast_s, eval_exact_ns / eval_fast_ns,
                eval_exact_ns, eval_fast_ns);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-orbit capture toolkit"};
    app.require_subcommand(1);

    CommonOpts hansen_o, tide_o, layout_o, traj_o, camp_o, val_o, bench_o;
    int q_lo = -12, q_hi = 12;
    double tide_lo = -1.0, tide_hi = 5.0;
    int tide_samples = 6000;
    double theta0 = 0.0, thetadot0 = 49.0;
    std::uint64_t iters = 20000000, stride = 1000;
    std::uint64_t I = 3200;
    std::string tide_cache, checkpoint;
    std::uint64_t checkpoint_every = 0;
    bool no_calibration = false;
    bool rk_everywhere = false;
    int hem_samples = 250;
    int bench_iters = 2000;

    CLI::App* c_hansen = app.add_subcommand("hansen", "dump the G20q(e) table as CSV");
    add_common(c_hansen, hansen_o);
    c_hansen->add_option("--q-lo", q_lo, "lowest q");
    c_hansen->add_option("--q-hi", q_hi, "highest q");

    CLI::App* c_tide =
        app.add_subcommand("tide-dump", "dump the tidal acceleration and derivative");
    add_common(c_tide, tide_o);
    c_tide->add_option("--lo", tide_lo, "grid start, theta_dot/n");
    c_tide->add_option("--hi", tide_hi, "grid end, theta_dot/n");
    c_tide->add_option("--samples", tide_samples, "grid intervals");

    CLI::App* c_layout = app.add_subcommand("layout-dump", "dump the strip layout as JSON");
    add_common(c_layout, layout_o);

    CLI::App* c_traj = app.add_subcommand("traj", "iterate one trajectory");
    add_common(c_traj, traj_o);
    c_traj->add_option("--theta0", theta0, "initial angle, rad");
    c_traj->add_option("--thetadot0", thetadot0, "initial angular velocity, rad/yr");
    c_traj->add_option("--iters", iters, "maximum map iterations to record");
    c_traj->add_option("--stride", stride, "record every stride-th sample");
    c_traj->add_option("--tide-cache", tide_cache, "binary cache for the tidal fits");

    CLI::App* c_camp = app.add_subcommand("campaign", "Monte Carlo capture probabilities");
    add_common(c_camp, camp_o);
    c_camp->add_option("--i", I, "number of initial conditions");
    c_camp->add_option("--tide-cache", tide_cache, "binary cache for the tidal fits");
    c_camp->add_option("--checkpoint", checkpoint, "checkpoint file for resumable runs");
    c_camp->add_option("--checkpoint-every", checkpoint_every,
                       "write the checkpoint every N completed trajectories");
    c_camp->add_flag("--no-calibration", no_calibration,
                     "report raw seconds instead of calibrated CPU-sec");
    c_camp->add_flag("--rk-everywhere", rk_everywhere,
                     "integrate with the Runge-Kutta fallback in all strips");

    CLI::App* c_val = app.add_subcommand("validate", "run the numerical gates");
    add_common(c_val, val_o);
    c_val->add_option("--hem-samples", hem_samples, "random states per H strip");

    CLI::App* c_bench = app.add_subcommand("bench", "stepper and tidal-path timings");
    add_common(c_bench, bench_o);
    c_bench->add_option("--iters", bench_iters, "map iterations per measurement");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_hansen->parsed()) return cmd_hansen(hansen_o, q_lo, q_hi);
        if (c_tide->parsed()) return cmd_tide_dump(tide_o, tide_lo, tide_hi, tide_samples);
        if (c_layout->parsed()) return cmd_layout_dump(layout_o);
        if (c_traj->parsed())
            return cmd_traj(traj_o, theta0, thetadot0, iters, stride, tide_cache);
        if (c_camp->parsed())
            return cmd_campaign(camp_o, I, tide_cache, checkpoint_every, checkpoint,
                                no_calibration, rk_everywhere);
        if (c_val->parsed()) return cmd_validate(val_o, hem_samples);
        if (c_bench->parsed()) return cmd_bench(bench_o, bench_iters);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
