#pragma once

// 50-digit Taylor integration of real solutions. The B = +-I solutions are separatrices:
// a perturbation of size d near x = 1 grows like d exp(4x), so following them to x = 20
// needs about 40 correct digits from the seed onward.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "painleve_flow.hpp"

namespace p3::hp {

using real = boost::multiprecision::cpp_bin_float_50;
using complex = boost::multiprecision::cpp_complex_50;

inline real pi_h() { return boost::math::constants::pi<real>(); }

// log Gamma for Re z >= 0, z != 0: shift to |z| ~ 40 and use Stirling's series.
inline complex lgamma(const complex& z) {
    const int shift = 40;
    complex w = z + real(shift);
    complex acc(0.0);
    for (int j = 0; j < shift; ++j) acc += log(z + real(j));
    complex r = (w - real(0.5)) * log(w) - w + log(2 * pi_h()) / 2;
    complex w2 = w * w, wp = w;
    for (int k = 1; k <= 30; ++k) {
        real b = boost::math::bernoulli_b2n<real>(k);
        r += complex(b / real(2 * k * (2 * k - 1))) / wp;
        wp *= w2;
    }
    return r - acc;
}

struct State {
    real x;
    int k = 0;
    real f, gt;
};

inline ChartState to_double(const State& s) {
    return {static_cast<double>(s.x), s.k, cplx(static_cast<double>(s.f)), cplx(static_cast<double>(s.gt))};
}

inline State from_double(const ChartState& s) { return {real(s.x), s.k, real(s.f.real()), real(s.gt.real())}; }

inline real g_from_gt(const real& x, const real& f, const real& gt) { return -x / f + real(0.5) + f * gt / 2; }
inline real gt_from_g(const real& x, const real& f, const real& g) { return 2 * (g + x / f - real(0.5)) / f; }

inline State convert(const State& st, int k_new) {
    if (st.k == k_new) return st;
    if (st.f == 0) throw Error(ErrorKind::OnSingularLocus, "f_k = 0");
    real gk = g_from_gt(st.x, st.f, st.gt);
    real f0 = chart_eps1(st.k) == 1 ? st.f : real(1) / st.f;
    if (chart_eps2(st.k) == -1) f0 = -f0;
    real g0 = chart_eps1(st.k) * gk;
    real v = chart_eps2(k_new) == 1 ? f0 : real(-f0);
    real fk = chart_eps1(k_new) == 1 ? v : real(1 / v);
    real gkn = chart_eps1(k_new) * g0;
    return {st.x, k_new, fk, gt_from_g(st.x, fk, gkn)};
}

// ---------------------------------------------------------------- seeding

struct SeedInfo {
    State state;
    int series_order = 0;
    double truncation = 0;  // modulus of the last series level relative to |f|
};

// Seed for a RealLine point at or below x_request.
inline SeedInfo seed(const MonodromyPoint& p, double x_request, bool gap_safety = true) {
    if (reality_class(p) != RealityClass::RealLine)
        throw Error(ErrorKind::NotRealFamily, "extended precision seeding needs a RealLine point");
    if (!(x_request > 0)) throw Error(ErrorKind::SeedOutsideValidity, "x_small must be positive");
    AsymptoticCase c = asymptotic_case(p.s);
    bool recip = reciprocal_case(c);
    MonodromyPoint q = recip ? apply_symmetry(Symmetry::R1, 0.0, p).second : p;
    real s = q.s.real(), b5 = q.b5().real(), b6 = q.b6().real();
    SeedInfo out;
    const real half(0.5);

    if (c == AsymptoticCase::CPlus || c == AsymptoticCase::CMinus) {
        // leading form is exact up to a relative x^4 log^4 x
        real x = std::min(x_request, 1e-14);
        real bt = b5 > 0 ? real(1) : real(-1);
        real kk = -pi_h() / 2 * bt * b6 + boost::math::constants::euler<real>();
        real L = log(x / 2);
        real f = -2 * x * bt * (L + kk);
        real xf = -2 * x * bt * (L + kk + 1);
        real g = xf / (2 * f);
        out.state = {x, recip ? 1 : 0, f, gt_from_g(x, f, g)};
        return out;
    }
    if ((c == AsymptoticCase::BPlus || c == AsymptoticCase::BMinus) && !gap_safety)
        throw Error(ErrorKind::CaseUnsupported, "zeros/poles accumulate at 0 for |s| > 2; enable gap safety");

    complex alpha, bm;
    if (c == AsymptoticCase::A) {
        alpha = complex(asin(s / 2) / pi_h());
        bm = complex(b5 + sqrt(1 - s * s / 4) * b6);
    } else {
        real w = sqrt(s * s / 4 - 1);
        real lm = abs(1 - s * s / 2 - s * w);
        alpha = complex(half, log(lm) / (2 * pi_h()));
        bm = complex(b5, -w * b6);
        bm /= abs(bm);
    }
    complex K = exp(lgamma(complex(half) - alpha) - lgamma(complex(half) + alpha));
    complex eps = alpha * 2;

    double x = x_request;
    SpectralData sd = spectral(q.s);
    bool ladder = c != AsymptoticCase::A;
    double shrink = ladder ? std::exp(-pi / (2.0 * *sd.t_NI)) : 0.1;
    if (ladder) x = gap_midpoint(p, x);
    for (int attempt = 0; attempt < 40; ++attempt) {
        for (int M = 4; M <= 12; M += 2) {
            BasicSeries<complex> ser(eps, bm, K, M);
            std::vector<double> lv;
            auto v = ser.eval(complex(real(x)), &lv);
            double fa = static_cast<double>(abs(v.first));
            double last = std::max(lv[M], lv[M - 1]) / fa;
            if (last < 1e-48) {
                real xr(x), f = v.first.real(), xf = v.second.real();
                real g = xf / (2 * f);
                out.state = {xr, recip ? 1 : 0, f, gt_from_g(xr, f, g)};
                out.series_order = M;
                out.truncation = last;
                return out;
            }
        }
        x *= shrink;
    }
    throw Error(ErrorKind::SeedOutsideValidity, "series did not reach working precision");
}

// ---------------------------------------------------------------- Taylor flow

struct Options {
    int order = 50;
    double tol = 1e-46;
    double max_step = 0.1;  // |h| <= max_step * x
    FlowOptions chart{};     // switch thresholds, hysteresis, event detection
    int max_steps = 400000;
};

namespace detail {

// Taylor coefficients in h = x - x0 of (f_k, gt_k) from x f' = -2x + f + f^2 gt, x gt' = 4x^2 f - gt - f gt^2.
inline void taylor(const real& x0, const real& f, const real& gt, int N, std::vector<real>& F,
                   std::vector<real>& G) {
    F.assign(N + 1, real(0));
    G.assign(N + 1, real(0));
    std::vector<real> P(N + 1), Q(N + 1), R(N + 1), S(N + 1);
    F[0] = f;
    G[0] = gt;
    real x02 = x0 * x0;
    for (int n = 0; n < N; ++n) {
        real p = 0, r = 0;
        for (int i = 0; i <= n; ++i) {
            p += F[i] * F[n - i];
            r += G[i] * G[n - i];
        }
        P[n] = p;
        R[n] = r;
        real q = 0, s = 0;
        for (int i = 0; i <= n; ++i) {
            q += P[i] * G[n - i];
            s += F[i] * R[n - i];
        }
        Q[n] = q;
        S[n] = s;
        real lin = n == 0 ? real(-2 * x0) : (n == 1 ? real(-2) : real(0));
        real den = x0 * (n + 1);
        F[n + 1] = (lin + F[n] + Q[n] - n * F[n]) / den;
        real quad = x02 * F[n];
        if (n >= 1) quad += 2 * x0 * F[n - 1];
        if (n >= 2) quad += F[n - 2];
        G[n + 1] = (4 * quad - G[n] - S[n] - n * G[n]) / den;
    }
}

inline real horner(const std::vector<real>& a, const real& h) {
    real r = 0;
    for (int i = int(a.size()) - 1; i >= 0; --i) r = r * h + a[i];
    return r;
}

inline real dhorner(const std::vector<real>& a, const real& h) {
    real r = 0;
    for (int i = int(a.size()) - 1; i >= 1; --i) r = r * h + a[i] * i;
    return r;
}

// largest |h| keeping the two last Taylor terms below tol relative to the local scale
inline real step_bound(const std::vector<real>& Y, const real& x0, double tol) {
    int N = int(Y.size()) - 1;
    real scale = 0;
    real xp = 1;
    for (int k = 0; k <= 2; ++k) {
        scale = std::max(scale, real(abs(Y[k]) * xp));
        xp *= x0;
    }
    if (scale == 0) return real(-1);
    real lt = log(scale * tol);
    real best = -1;
    for (int n = N - 1; n <= N; ++n) {
        if (Y[n] == 0) continue;
        real r = exp((lt - log(abs(Y[n]))) / n);
        if (best < 0 || r < best) best = r;
    }
    return best;
}

inline int choose_chart(const State& st, const FlowOptions& o, bool in_hysteresis) {
    if (st.f == 0) return -1;
    real af = abs(st.f);
    int best = -1;
    real bestg = 0;
    for (int j = 0; j < 4; ++j) {
        State c = convert(st, j);
        if (abs(c.f) > o.switch_threshold) continue;
        real g = abs(c.gt);
        if (!boost::multiprecision::isfinite(g)) continue;
        if (best < 0 || g < bestg) {
            best = j;
            bestg = g;
        }
    }
    if (best < 0 || best == st.k) return -1;
    if (af > o.hard_threshold) return best;
    if (in_hysteresis) return -1;
    if (af > o.switch_threshold) return best;
    if (bestg < o.switch_ratio * abs(st.gt)) return best;
    return -1;
}

inline Sample make_sample(const State& st, bool ev) {
    ChartState d = to_double(st);
    return {d.x, sample_f0(d), st.k, d, ev};
}

}  // namespace detail

inline Trajectory flow(const State& init, double x_target, const Options& o = {}, State* final_state = nullptr) {
    if (!(init.x > 0) || !(x_target > 0)) throw Error(ErrorKind::Usage, "flow needs positive x");
    Trajectory tr;
    State st = init;
    tr.samples.push_back(detail::make_sample(st, false));
    real xt(x_target);
    real dir = xt >= st.x ? real(1) : real(-1);
    double last_switch = -1e300;
    if (o.chart.allow_switch) {
        int j = detail::choose_chart(st, o.chart, false);
        if (j >= 0) {
            st = convert(st, j);
            tr.samples.back() = detail::make_sample(st, false);
            ++tr.diagnostics.switches;
            last_switch = std::log(static_cast<double>(st.x));
        }
    }
    std::vector<real> F, G;
    for (int n = 0; n < o.max_steps; ++n) {
        if ((xt - st.x) * dir <= 0) break;
        detail::taylor(st.x, st.f, st.gt, o.order, F, G);
        real hf = detail::step_bound(F, st.x, o.tol), hg = detail::step_bound(G, st.x, o.tol);
        real h = o.max_step * st.x;
        if (hf > 0) h = std::min(h, hf);
        if (hg > 0) h = std::min(h, hg);
        bool last = false;
        if (h >= abs(xt - st.x)) {
            h = abs(xt - st.x);
            last = true;
        }
        h *= dir;
        if (abs(h) < st.x * 1e-40) throw Error(ErrorKind::StepFailure, "Taylor step underflow");
        real f1 = detail::horner(F, h), g1 = detail::horner(G, h);
        if (!boost::multiprecision::isfinite(f1) || !boost::multiprecision::isfinite(g1))
            throw Error(ErrorKind::NonFiniteState, "non-finite state");
        ++tr.diagnostics.accepted;

        if (o.chart.detect_events && F[0] != 0 && ((F[0] < 0) != (f1 < 0)) && f1 != 0) {
            // safeguarded Newton on the Taylor polynomial
            real a = 0, b = h, fa = F[0];
            real c = F[0] / (F[0] - f1) * h;
            for (int it = 0; it < 200; ++it) {
                real fc = detail::horner(F, c);
                if (fc == 0) break;
                if ((fc < 0) == (fa < 0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
                real d = detail::dhorner(F, c);
                real cn = d != 0 ? real(c - fc / d) : real((a + b) / 2);
                if ((cn - a) * (cn - b) > 0) cn = (a + b) / 2;
                real step = abs(cn - c);
                c = cn;
                if (step <= abs(h) * 1e-45) break;
            }
            State es{st.x + c, st.k, real(0), detail::horner(G, c)};
            ChartState d = to_double(es);
            tr.events.push_back({d.x, kind_of_chart(st.k), d.gt});
            tr.samples.push_back(detail::make_sample(es, true));
        }

        st = {last ? xt : real(st.x + h), st.k, f1, g1};
        tr.samples.push_back(detail::make_sample(st, false));
        if (o.chart.allow_switch) {
            double lt = std::log(static_cast<double>(st.x));
            bool hyst = std::abs(lt - last_switch) < o.chart.hysteresis;
            int j = detail::choose_chart(st, o.chart, hyst);
            if (j >= 0) {
                st = convert(st, j);
                tr.samples.back() = detail::make_sample(st, false);
                ++tr.diagnostics.switches;
                last_switch = lt;
            }
        }
        if (last) break;
    }
    if ((xt - st.x) * dir > 0) throw Error(ErrorKind::StepFailure, "step budget exhausted");
    if (final_state) *final_state = st;
    return tr;
}

}  // namespace p3::hp
