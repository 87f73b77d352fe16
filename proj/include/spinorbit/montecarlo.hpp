#pragma once

// Monte Carlo campaign over random initial conditions in
// Q = [0, pi] x [0, 5n]: seeded, index-addressable draws; a worker pool of
// independent trajectories; aggregation into capture probabilities with 95%
// confidence intervals and calibrated CPU-sec timings.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spinorbit/capture.hpp"
#include "spinorbit/cpusec.hpp"
#include "spinorbit/integrators.hpp"

namespace spinorbit {

// --- seeded, order-independent sampling --------------------------------------

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double unit_double(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;   // [0, 1)
}

} // namespace detail

struct Domain {
    double theta_lo = 0.0, theta_hi = M_PI;
    double theta_dot_lo = 0.0, theta_dot_hi = 0.0;     // hi = 5n when 0
};

// Uniform draw over the domain, fully determined by (seed, index).
inline State sample_initial(std::uint64_t seed, std::uint64_t index, const Domain& d) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (index + 1));
    detail::splitmix64(s);   // decorrelate nearby (seed, index) pairs
    const double u1 = detail::unit_double(detail::splitmix64(s));
    const double u2 = detail::unit_double(detail::splitmix64(s));
    State st;
    st.theta = d.theta_lo + u1 * (d.theta_hi - d.theta_lo);
    st.theta_dot = d.theta_dot_lo + u2 * (d.theta_dot_hi - d.theta_dot_lo);
    st.t = 0.0;
    return st;
}

// --- campaign -----------------------------------------------------------------

struct CampaignConfig {
    std::uint64_t trajectories = 3200;   // I
    Domain domain;                       // defaults resolved against params
    std::uint64_t seed = 1;
    int workers = 1;
    CaptureConfig capture;
    bool calibrate_timings = true;       // false: report raw seconds (tests)
    std::uint64_t checkpoint_every = 0;  // completed trajectories; 0 = off
    std::string checkpoint_path;
};

struct TrajectoryResult {
    std::uint64_t index = 0;
    double theta0 = 0.0, theta_dot0 = 0.0;
    bool captured = false;
    bool failed = false;
    int attractor_2p = 0;
    std::uint64_t capture_iteration = 0;
    std::uint64_t blocks = 0;
    std::uint64_t iterations = 0;
    double final_theta_dot = 0.0;
    double cpu_sec = 0.0;               // calibrated CPU-sec to capture
    std::uint64_t h_substeps = 0, n_substeps = 0, outside_substeps = 0;
    std::string error;
};

struct AttractorStat {
    std::uint64_t count = 0;
    double p_hat = 0.0;
    double delta_p = 0.0;               // 1.96 sqrt(p(1-p)/I)
};

struct ProbabilityReport {
    std::uint64_t total = 0;            // I
    std::uint64_t failed = 0;           // excluded from probability mass
    std::uint64_t uncaptured = 0;
    std::map<int, AttractorStat> attractors;   // keyed by attractor_2p
    double time_mean = 0.0, time_sd = 0.0, time_min = 0.0, time_max = 0.0;
    IterationCounters totals;
    std::vector<std::uint64_t> time_histogram;  // 200 CPU-sec bins
    static constexpr double histogram_bin = 200.0;
};

inline double wilson_halfwidth(double p_hat, double denom) {
    return denom > 0.0 ? 1.96 * std::sqrt(p_hat * (1.0 - p_hat) / denom) : 0.0;
}

inline ProbabilityReport aggregate_results(const std::vector<TrajectoryResult>& rs) {
    ProbabilityReport rep;
    rep.total = rs.size();
    double tmin = 0.0, tmax = 0.0, tsum = 0.0, tsq = 0.0;
    std::uint64_t ncap = 0;
    for (const auto& r : rs) {
        rep.totals.h_substeps += r.h_substeps;
        rep.totals.n_substeps += r.n_substeps;
        rep.totals.outside_substeps += r.outside_substeps;
        if (r.failed) {
            ++rep.failed;
            continue;
        }
        if (!r.captured) {
            ++rep.uncaptured;
            continue;
        }
        ++rep.attractors[r.attractor_2p].count;
        if (ncap == 0 || r.cpu_sec < tmin) tmin = r.cpu_sec;
        if (ncap == 0 || r.cpu_sec > tmax) tmax = r.cpu_sec;
        tsum += r.cpu_sec;
        tsq += r.cpu_sec * r.cpu_sec;
        ++ncap;
        const auto bin = static_cast<std::size_t>(r.cpu_sec / ProbabilityReport::histogram_bin);
        if (rep.time_histogram.size() <= bin) rep.time_histogram.resize(bin + 1, 0);
        ++rep.time_histogram[bin];
    }
    const double denom = static_cast<double>(rep.total - rep.failed);
    for (auto& [a, st] : rep.attractors) {
        st.p_hat = static_cast<double>(st.count) / denom;
        st.delta_p = wilson_halfwidth(st.p_hat, denom);
    }
    if (ncap > 0) {
        rep.time_mean = tsum / static_cast<double>(ncap);
        const double var = std::max(0.0, tsq / static_cast<double>(ncap) -
                                             rep.time_mean * rep.time_mean);
        rep.time_sd = std::sqrt(var);
        rep.time_min = tmin;
        rep.time_max = tmax;
    }
    return rep;
}

// --- checkpoint file (plain text, one row per completed trajectory) ----------

namespace detail {

inline std::string result_line(const TrajectoryResult& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%llu %.17g %.17g %d %d %d %llu %llu %llu %.17g %.17g %llu %llu %llu",
                  static_cast<unsigned long long>(r.index), r.theta0, r.theta_dot0,
                  r.captured ? 1 : 0, r.failed ? 1 : 0, r.attractor_2p,
                  static_cast<unsigned long long>(r.capture_iteration),
                  static_cast<unsigned long long>(r.blocks),
                  static_cast<unsigned long long>(r.iterations), r.final_theta_dot,
                  r.cpu_sec, static_cast<unsigned long long>(r.h_substeps),
                  static_cast<unsigned long long>(r.n_substeps),
                  static_cast<unsigned long long>(r.outside_substeps));
    return buf;
}

inline bool parse_result_line(const std::string& line, TrajectoryResult& r) {
    std::istringstream in(line);
    int cap = 0, fail = 0;
    if (!(in >> r.index >> r.theta0 >> r.theta_dot0 >> cap >> fail >> r.attractor_2p >>
          r.capture_iteration >> r.blocks >> r.iterations >> r.final_theta_dot >>
          r.cpu_sec >> r.h_substeps >> r.n_substeps >> r.outside_substeps))
        return false;
    r.captured = cap != 0;
    r.failed = fail != 0;
    return true;
}

} // namespace detail

struct CampaignOutcome {
    ProbabilityReport report;
    std::vector<TrajectoryResult> results;   // indexed by trajectory
};

// Run one trajectory to capture or the iteration cap.
inline TrajectoryResult run_trajectory(const PoincareMap& map, std::uint64_t seed,
                                       std::uint64_t index, const Domain& domain,
                                       const CaptureConfig& capture,
                                       double seconds_per_cpusec = 0.0) {
    TrajectoryResult r;
    r.index = index;
    State st = sample_initial(seed, index, domain);
    r.theta0 = st.theta;
    r.theta_dot0 = st.theta_dot;
    CaptureDetector det(capture, map.params().n());
    auto walker = map.make_walker();
    IterationCounters ic;
    const double t0 = thread_cpu_seconds();
    try {
        for (std::uint64_t k = 0; k < capture.max_iterations; ++k) {
            st = walker.advance(st, &ic);
            ++r.iterations;
            if (det.feed(st.theta_dot)) break;
        }
    } catch (const IntegrationError& e) {
        r.failed = true;
        r.error = e.what();
    }
    const double raw = thread_cpu_seconds() - t0;
    r.captured = det.report().captured;
    r.attractor_2p = det.report().attractor_2p;
    r.capture_iteration = det.report().capture_iteration;
    r.blocks = det.report().blocks_processed;
    r.final_theta_dot = st.theta_dot;
    r.cpu_sec = seconds_per_cpusec > 0.0 ? raw / seconds_per_cpusec : raw;
    r.h_substeps = ic.h_substeps;
    r.n_substeps = ic.n_substeps;
    r.outside_substeps = ic.outside_substeps;
    return r;
}

// I trajectories over a worker pool. Each (seed, index) pair fully determines
// its draw and its result, so the outcome is independent of worker count and
// scheduling. Optionally resumes from / writes a checkpoint file.
inline CampaignOutcome run_campaign(CampaignConfig cfg, const PoincareMap& map,
                                    bool (*progress)(std::uint64_t done,
                                                     std::uint64_t total) = nullptr) {
    cfg.capture.validate();
    if (cfg.domain.theta_dot_hi == 0.0) cfg.domain.theta_dot_hi = 5.0 * map.params().n();
    if (cfg.workers < 1) cfg.workers = 1;

    const std::uint64_t total = cfg.trajectories;
    std::vector<TrajectoryResult> results(total);
    // results[i] is published by its worker via a release store on done[i];
    // the checkpoint writer reads it only after an acquire load sees it set
    std::vector<std::atomic<std::uint8_t>> done(total);

    // resume
    if (!cfg.checkpoint_path.empty()) {
        std::ifstream in(cfg.checkpoint_path);
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            TrajectoryResult r;
            if (detail::parse_result_line(line, r) && r.index < total &&
                !done[r.index].load(std::memory_order_relaxed)) {
                results[r.index] = r;
                done[r.index].store(1, std::memory_order_relaxed);
            }
        }
    }

    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> completed{0};
    std::mutex io_mutex;
    std::uint64_t last_checkpoint = 0;
    std::atomic<bool> stop{false};

    auto flush_checkpoint = [&](bool force) {
        if (cfg.checkpoint_path.empty()) return;
        std::lock_guard<std::mutex> lock(io_mutex);
        const std::uint64_t c = completed.load();
        if (!force && c < last_checkpoint + cfg.checkpoint_every) return;
        last_checkpoint = c;
        std::ofstream out(cfg.checkpoint_path + ".tmp");
        out << "# spinorbit campaign checkpoint seed=" << cfg.seed << " I=" << total << "\n";
        for (std::uint64_t i = 0; i < total; ++i)
            if (done[i].load(std::memory_order_acquire))
                out << detail::result_line(results[i]) << "\n";
        out.close();
        std::rename((cfg.checkpoint_path + ".tmp").c_str(), cfg.checkpoint_path.c_str());
    };

    auto work = [&]() {
        double scale = 0.0;
        if (cfg.calibrate_timings) scale = cpu_sec_calibrate();
        while (!stop.load(std::memory_order_relaxed)) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= total) break;
            if (done[i].load(std::memory_order_relaxed)) {
                ++completed;
                continue;
            }
            results[i] =
                run_trajectory(map, cfg.seed, i, cfg.domain, cfg.capture, scale);
            done[i].store(1, std::memory_order_release);
            const std::uint64_t c = ++completed;
            if (results[i].captured && cfg.calibrate_timings)
                scale = cpu_sec_calibrate();   // re-time after every capture
            if (cfg.checkpoint_every > 0 && c % cfg.checkpoint_every == 0)
                flush_checkpoint(false);
            if (progress) {
                std::lock_guard<std::mutex> lock(io_mutex);
                if (!progress(c, total)) stop.store(true);
            }
        }
    };

    if (cfg.workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(cfg.workers));
        for (int wi = 0; wi < cfg.workers; ++wi) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    flush_checkpoint(true);

    CampaignOutcome out;
    out.results = std::move(results);
    out.report = aggregate_results(out.results);
    return out;
}

} // namespace spinorbit
