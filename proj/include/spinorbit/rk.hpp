#pragma once

// Adaptive explicit Runge-Kutta integrator for the two-component spin ODE:
// the 8th-order Dormand-Prince scheme with embedded 5th/3rd-order error
// estimation (Hairer, Norsett & Wanner), specialised to n = 2 equations.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spinorbit {

// Thrown when the step size underflows (stiffness indicator) or the step
// budget is exhausted; carries the state and time reached.
struct IntegrationError : std::runtime_error {
    double theta, theta_dot, t_reached;
    IntegrationError(const std::string& what, double th, double td, double t)
        : std::runtime_error(what + " at t = " + std::to_string(t)),
          theta(th), theta_dot(td), t_reached(t) {}
};

// RHS: callable as rhs(t, y[2], dy[2]).
template <class Rhs>
class Dop853 {
public:
    Dop853(Rhs rhs, double abs_tol, double rel_tol)
        : rhs_(rhs), atol_(abs_tol), rtol_(rel_tol) {}

    // Advance y (length 2) from t0 to t1 > t0, landing exactly on t1.
    // The last step-size suggestion survives across calls.
    void integrate(double y[2], double t0, double t1);

    void reset_step_size() { h_next_ = 0.0; }
    double suggested_step() const { return h_next_; }
    Rhs& rhs() { return rhs_; }

private:
    double initial_step(double t, const double y[2], const double k1[2]);

    Rhs rhs_;
    double atol_, rtol_;
    double h_next_ = 0.0;
    long max_steps_ = 100000000;
    static constexpr double safe_ = 0.9;
    static constexpr double fac_min_ = 0.333;
    static constexpr double fac_max_ = 6.0;
};

template <class Rhs>
void Dop853<Rhs>::integrate(double y[2], double t0, double t1) {
    // Dormand-Prince 8(5,3) tableau (Hairer's DOP853 constants)
    constexpr double c2 = 0.526001519587677318785587544488e-01;
    constexpr double c3 = 0.789002279381515978178381316732e-01;
    constexpr double c4 = 0.118350341907227396726757197510e+00;
    constexpr double c5 = 0.281649658092772603273242802490e+00;
    constexpr double c6 = 0.333333333333333333333333333333e+00;
    constexpr double c7 = 0.25e+00;
    constexpr double c8 = 0.307692307692307692307692307692e+00;
    constexpr double c9 = 0.651282051282051282051282051282e+00;
    constexpr double c10 = 0.6e+00;
    constexpr double c11 = 0.857142857142857142857142857142e+00;
    constexpr double a21 = 5.26001519587677318785587544488e-2;
    constexpr double a31 = 1.97250569845378994544595329183e-2;
    constexpr double a32 = 5.91751709536136983633785987549e-2;
    constexpr double a41 = 2.95875854768068491816892993775e-2;
    constexpr double a43 = 8.87627564304205475450678981324e-2;
    constexpr double a51 = 2.41365134159266685502369798665e-1;
    constexpr double a53 = -8.84549479328286085344864962717e-1;
    constexpr double a54 = 9.24834003261792003115737966543e-1;
    constexpr double a61 = 3.7037037037037037037037037037e-2;
    constexpr double a64 = 1.70828608729473871279604482173e-1;
    constexpr double a65 = 1.25467687566822425016691814123e-1;
    constexpr double a71 = 3.7109375e-2;
    constexpr double a74 = 1.70252211019544039314978060272e-1;
    constexpr double a75 = 6.02165389804559606850219397283e-2;
    constexpr double a76 = -1.7578125e-2;
    constexpr double a81 = 3.70920001185047927108779319836e-2;
    constexpr double a84 = 1.70383925712239993810214054705e-1;
    constexpr double a85 = 1.07262030446373284651809199168e-1;
    constexpr double a86 = -1.53194377486244017527936158236e-2;
    constexpr double a87 = 8.27378916381402288758473766002e-3;
    constexpr double a91 = 6.24110958716075717114429577812e-1;
    constexpr double a94 = -3.36089262944694129406857109825e0;
    constexpr double a95 = -8.68219346841726006818189891453e-1;
    constexpr double a96 = 2.75920996994467083049415600797e1;
    constexpr double a97 = 2.01540675504778934086186788979e1;
    constexpr double a98 = -4.34898841810699588477366255144e1;
    constexpr double a101 = 4.77662536438264365890433908527e-1;
    constexpr double a104 = -2.48811461997166764192642586468e0;
    constexpr double a105 = -5.90290826836842996371446475743e-1;
    constexpr double a106 = 2.12300514481811942347288949897e1;
    constexpr double a107 = 1.52792336328824235832596922938e1;
    constexpr double a108 = -3.32882109689848629194453265587e1;
    constexpr double a109 = -2.03312017085086261358222928593e-2;
    constexpr double a111 = -9.3714243008598732571704021658e-1;
    constexpr double a114 = 5.18637242884406370830023853209e0;
    constexpr double a115 = 1.09143734899672957818500254654e0;
    constexpr double a116 = -8.14978701074692612513997267357e0;
    constexpr double a117 = -1.85200656599969598641566180701e1;
    constexpr double a118 = 2.27394870993505042818970056734e1;
    constexpr double a119 = 2.49360555267965238987089396762e0;
    constexpr double a1110 = -3.0467644718982195003823669022e0;
    constexpr double a121 = 2.27331014751653820792359768449e0;
    constexpr double a124 = -1.05344954667372501984066689879e1;
    constexpr double a125 = -2.00087205822486249909675718444e0;
    constexpr double a126 = -1.79589318631187989172765950534e1;
    constexpr double a127 = 2.79488845294199600508499808837e1;
    constexpr double a128 = -2.85899827713502369474065508674e0;
    constexpr double a129 = -8.87285693353062954433549289258e0;
    constexpr double a1210 = 1.23605671757943030647266201528e1;
    constexpr double a1211 = 6.43392746015763530355970484046e-1;
    constexpr double b1 = 5.42937341165687622380535766363e-2;
    constexpr double b6 = 4.45031289275240888144113950566e0;
    constexpr double b7 = 1.89151789931450038304281599044e0;
    constexpr double b8 = -5.8012039600105847814672114227e0;
    constexpr double b9 = 3.1116436695781989440891606237e-1;
    constexpr double b10 = -1.52160949662516078556178806805e-1;
    constexpr double b11 = 2.01365400804030348374776537501e-1;
    constexpr double b12 = 4.47106157277725905176885569043e-2;
    constexpr double bhh1 = 0.244094488188976377952755905512e+00;
    constexpr double bhh2 = 0.733846688281611857341361741547e+00;
    constexpr double bhh3 = 0.220588235294117647058823529412e-01;
    constexpr double er1 = 0.1312004499419488073250102996e-01;
    constexpr double er6 = -0.1225156446376204440720569753e+01;
    constexpr double er7 = -0.4957589496572501915214079952e+00;
    constexpr double er8 = 0.1664377182454986536961530415e+01;
    constexpr double er9 = -0.3503288487499736816886487290e+00;
    constexpr double er10 = 0.3341791187130174790297318841e+00;
    constexpr double er11 = 0.8192320648511571246570742613e-01;
    constexpr double er12 = -0.2235530786388629525884427845e-01;

    double t = t0;
    double k1[2], k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], k8[2], k9[2], k10[2];
    double w[2], y1[2];
    rhs_(t, y, k1);
    double h = (h_next_ > 0.0) ? h_next_ : initial_step(t, y, k1);
    bool rejected = false;
    long steps = 0;

    while (t < t1) {
        if (++steps > max_steps_)
            throw IntegrationError("rk: step budget exhausted", y[0], y[1], t);
        bool last = false;
        double hs = h;
        if (t + hs >= t1) {
            hs = t1 - t;
            last = true;
        }
        if (hs < 4.0 * 2.220446049250313e-16 * std::abs(t) + 1e-300)
            throw IntegrationError("rk: step size underflow (stiff?)", y[0], y[1], t);

        for (int i = 0; i < 2; ++i) w[i] = y[i] + hs * a21 * k1[i];
        rhs_(t + c2 * hs, w, k2);
        for (int i = 0; i < 2; ++i) w[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs_(t + c3 * hs, w, k3);
        for (int i = 0; i < 2; ++i) w[i] = y[i] + hs * (a41 * k1[i] + a43 * k3[i]);
        rhs_(t + c4 * hs, w, k4);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + hs * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        rhs_(t + c5 * hs, w, k5);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + hs * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        rhs_(t + c6 * hs, w, k6);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + hs * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs_(t + c7 * hs, w, k7);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + hs * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] +
                                a87 * k7[i]);
        rhs_(t + c8 * hs, w, k8);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + hs * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] +
                                a97 * k7[i] + a98 * k8[i]);
        rhs_(t + c9 * hs, w, k9);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + hs * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                                a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
        rhs_(t + c10 * hs, w, k10);
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + hs * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                                a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        rhs_(t + c11 * hs, w, k2);                      // stage 11 reuses k2
        for (int i = 0; i < 2; ++i)
            w[i] = y[i] + hs * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                                a127 * k7[i] + a128 * k8[i] + a129 * k9[i] +
                                a1210 * k10[i] + a1211 * k2[i]);
        rhs_(t + hs, w, k3);                            // stage 12 reuses k3

        double ksum[2];
        for (int i = 0; i < 2; ++i) {
            ksum[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                      b10 * k10[i] + b11 * k2[i] + b12 * k3[i];
            y1[i] = y[i] + hs * ksum[i];
        }

        double err5 = 0.0, err3 = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sk = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y1[i]));
            const double e3 = (ksum[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k3[i]) / sk;
            const double e5 = (er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] +
                               er9 * k9[i] + er10 * k10[i] + er11 * k2[i] + er12 * k3[i]) / sk;
            err3 += e3 * e3;
            err5 += e5 * e5;
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        const double err = hs * err5 * std::sqrt(1.0 / (2.0 * deno));

        if (err <= 1.0) {
            double scale = (err == 0.0)
                               ? fac_max_
                               : std::clamp(safe_ * std::pow(err, -0.125), fac_min_, fac_max_);
            if (rejected) scale = std::min(scale, 1.0);
            rejected = false;
            y[0] = y1[0];
            y[1] = y1[1];
            if (last) {
                t = t1;          // exact landing; keep the uncapped suggestion in h
            } else {
                t += hs;
                h = hs * scale;
                rhs_(t, y, k1);
            }
        } else {
            h = hs * std::max(safe_ * std::pow(err, -0.125), fac_min_);
            rejected = true;
            if (last && h >= t1 - t) h = 0.5 * (t1 - t);   // force progress below the cap
        }
    }
    h_next_ = h;
}

template <class Rhs>
double Dop853<Rhs>::initial_step(double t, const double y[2], const double k1[2]) {
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = atol_ + rtol_ * std::abs(y[i]);
        dnf += (k1[i] / sk) * (k1[i] / sk);
        dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    double y2[2] = {y[0] + h * k1[0], y[1] + h * k1[1]};
    double k2[2];
    rhs_(t + h, y2, k2);
    double der2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = atol_ + rtol_ * std::abs(y[i]);
        const double d = (k2[i] - k1[i]) / sk;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                       : std::pow(0.01 / der12, 0.125);
    return std::min(100.0 * h, h1);
}

} // namespace spinorbit
