#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "core.hpp"

namespace p3 {

template <std::size_t N>
using CVec = std::array<cplx, N>;

template <std::size_t N>
struct StepResult {
    CVec<N> y;
    CVec<N> err;
};

// One Dormand-Prince 5(4) step for dy/dt = F(t, y), t real.
template <std::size_t N, class F>
StepResult<N> dp45_step(F&& rhs, double t, const CVec<N>& y, double h) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    CVec<N> k1 = rhs(t, y), k2, k3, k4, k5, k6, k7, tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a21 * k1[i]);
    k2 = rhs(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(t + h, tmp);
    StepResult<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs(t + h, out.y);
    for (std::size_t i = 0; i < N; ++i)
        out.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    return out;
}

template <std::size_t N>
double error_norm(const CVec<N>& y0, const CVec<N>& y1, const CVec<N>& err, double atol, double rtol) {
    double m = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        m = std::max(m, std::abs(err[i]) / sc);
    }
    return m;
}

inline double step_factor(double en) {
    if (en == 0) return 5.0;
    return std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
}

struct TransportStats {
    int accepted = 0;
    int rejected = 0;
};

// Adaptive integration of a linear system from t0 to t1. The state is renormalized
// after each step; the accumulated log scale is added to log_scale.
template <std::size_t N, class F>
CVec<N> integrate_linear(F&& rhs, double t0, double t1, CVec<N> y, double rtol, cplx& log_scale,
                         TransportStats* stats = nullptr, int max_steps = 200000) {
    double t = t0;
    double dir = t1 >= t0 ? 1.0 : -1.0;
    double span = std::abs(t1 - t0);
    if (span == 0) return y;
    double h = dir * std::min(span, 1e-2 * std::max(1.0, span));
    for (int n = 0; n < max_steps; ++n) {
        if ((t1 - t) * dir <= 0) return y;
        if ((t + h - t1) * dir > 0) h = t1 - t;
        auto r = dp45_step<N>(rhs, t, y, h);
        double en = error_norm<N>(y, r.y, r.err, 1e-300, rtol);
        if (!std::isfinite(en)) {
            h *= 0.2;
            if (stats) ++stats->rejected;
            continue;
        }
        if (en <= 1.0) {
            t = (std::abs(t1 - (t + h)) < 1e-15 * std::max(1.0, std::abs(t1))) ? t1 : t + h;
            y = r.y;
            double nrm = 0;
            for (auto& v : y) nrm = std::max(nrm, std::abs(v));
            if (nrm == 0 || !std::isfinite(nrm))
                throw Error(ErrorKind::TransportOverflow, "degenerate transported row");
            for (auto& v : y) v /= nrm;
            log_scale += std::log(nrm);
            if (stats) ++stats->accepted;
        } else if (stats) {
            ++stats->rejected;
        }
        h *= step_factor(en);
    }
    throw Error(ErrorKind::StepFailure, "transport exceeded step budget");
}

}  // namespace p3
