#pragma once

// Machine-independent time unit: 1 CPU-sec is the thread-CPU time needed to
// evaluate the calibration sum S(N_c), N_c = 5.96e7, by literal term-by-term
// summation (5m multiplications, 6m-1 additions, fixed order).

#include <ctime>

namespace spinorbit {

inline constexpr long kCalibrationN = 59600000;   // N_c

// S(m) = sum_{i=1..m} (i+1)(i+3) / (i (i+2)(i+4)(i+6))
inline double calibration_sum(long m) {
    double s = 0.0;
    for (long j = 1; j <= m; ++j) {
        const double i = static_cast<double>(j);
        s += ((i + 1.0) * (i + 3.0)) / (i * (i + 2.0) * (i + 4.0) * (i + 6.0));
    }
    return s;
}

// CPU time of the calling thread, seconds.
inline double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

// Wall-CPU seconds corresponding to one CPU-sec unit on this machine.
inline double cpu_sec_calibrate() {
    const double t0 = thread_cpu_seconds();
    volatile double sink = calibration_sum(kCalibrationN);
    (void)sink;
    return thread_cpu_seconds() - t0;
}

} // namespace spinorbit
