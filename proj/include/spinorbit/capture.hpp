#pragma once

// Capture detection from the Poincare-section sequence theta_dot_k: block
// means of theta_dot/n must sit near a half-integer resonance and block
// least-squares gradients must be near zero for K successive blocks.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace spinorbit {

struct CaptureConfig {
    long L = 10000;              // block length
    int K = 8;                   // successive passing blocks required
    double eps_i = 1e-3;         // |2 ybar - [2 ybar]| threshold
    double eps_m = 3e-7;         // |least-squares gradient| threshold
    std::uint64_t max_iterations = 20000000;

    void validate() const {
        if (L < 2) throw std::domain_error("CaptureConfig: L must be >= 2");
        if (K < 1) throw std::domain_error("CaptureConfig: K must be >= 1");
        if (!(eps_i > 0.0) || !(eps_m > 0.0))
            throw std::domain_error("CaptureConfig: thresholds must be positive");
    }
};

struct CaptureReport {
    bool captured = false;
    int attractor_2p = 0;            // nearest integer to 2 <theta_dot/n>
    std::uint64_t capture_iteration = 0;   // sample count at the K-th block
    std::uint64_t blocks_processed = 0;
    double cpu_seconds = 0.0;        // calibrated CPU-sec, filled by campaign
};

// Block statistics: mean of theta_dot/n and the ordinary least-squares slope
// of theta_dot against the in-block sample index. Centred two-pass sums keep
// the slope noise floor orders of magnitude below the capture thresholds.
inline std::pair<double, double> block_stats(std::span<const double> theta_dot,
                                             double n) {
    const std::size_t L = theta_dot.size();
    if (L < 2)
        throw std::domain_error("block_stats: block must hold at least two samples");
    double sum = 0.0, comp = 0.0;            // Kahan-compensated mean
    for (const double v : theta_dot) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double mean = sum / static_cast<double>(L);
    const double kbar = 0.5 * static_cast<double>(L - 1);
    double cov = 0.0;
    for (std::size_t k = 0; k < L; ++k)
        cov += (static_cast<double>(k) - kbar) * (theta_dot[k] - mean);
    const double Ld = static_cast<double>(L);
    const double skk = Ld * (Ld * Ld - 1.0) / 12.0;   // sum of (k - kbar)^2
    return {mean / n, cov / skk};
}

// Streaming detector; buffers one block (O(L) storage).
class CaptureDetector {
public:
    CaptureDetector(const CaptureConfig& cfg, double n) : cfg_(cfg), n_(n) {
        cfg_.validate();
        block_.reserve(static_cast<std::size_t>(cfg_.L));
    }

    // Feed the next theta_dot sample. Returns true exactly once, when the
    // K-th successive passing block completes.
    bool feed(double theta_dot) {
        if (report_.captured) return false;
        block_.push_back(theta_dot);
        ++total_;
        if (block_.size() < static_cast<std::size_t>(cfg_.L)) return false;

        const auto [ybar, slope] = block_stats(block_, n_);
        block_.clear();
        ++report_.blocks_processed;

        const double y2 = 2.0 * ybar;
        const double frac = std::abs(y2 - std::nearbyint(y2));
        if (frac < cfg_.eps_i && std::abs(slope) < cfg_.eps_m) {
            ++passes_;
            if (passes_ >= cfg_.K) {
                report_.captured = true;
                report_.attractor_2p = static_cast<int>(std::nearbyint(y2));
                report_.capture_iteration = total_;
                return true;
            }
        } else {
            passes_ = 0;   // a failing block resets the run
        }
        return false;
    }

    std::uint64_t samples() const { return total_; }
    const CaptureReport& report() const { return report_; }

private:
    CaptureConfig cfg_;
    double n_;
    std::vector<double> block_;
    int passes_ = 0;
    std::uint64_t total_ = 0;
    CaptureReport report_;
};

} // namespace spinorbit
