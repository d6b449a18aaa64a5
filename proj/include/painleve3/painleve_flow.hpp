#pragma once

#include <optional>
#include <vector>

#include "asymptotics.hpp"
#include "chart.hpp"
#include "ode.hpp"

namespace p3 {

struct FlowEvent {
    double x;
    EventKind kind;
    cplx gt_at_event;
    int chart() const { return static_cast<int>(kind); }
};

struct Sample {
    double x;
    std::optional<cplx> f0;  // empty at a zero of f_k with k odd (pole of f0)
    int chart;
    ChartState state;
    bool event_flag = false;
};

struct FlowDiagnostics {
    int accepted = 0;
    int rejected = 0;
    int switches = 0;
    double max_error_estimate = 0;  // largest normalized local error of accepted steps
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<FlowEvent> events;
    FlowDiagnostics diagnostics;

    const ChartState& final_state() const { return samples.back().state; }
};

struct FlowOptions {
    double atol = 1e-10;
    double rtol = 1e-10;
    double switch_threshold = 1.0;
    double switch_ratio = 0.5;    // switch within a pair when |gt_best| < ratio |gt_active|
    double hysteresis = 1e-6;     // relative x interval without switching
    double hard_threshold = 4.0;  // |f_active| above this forces a switch regardless of hysteresis
    bool allow_switch = true;
    bool detect_events = true;
    int max_steps = 2000000;
    double event_accept = 1e-6;   // |f_k(x*)| <= event_accept * max(x*, 1e-300) for a real zero
};

inline std::optional<cplx> sample_f0(const ChartState& st) {
    if (st.f == cplx(0.0)) {
        if (chart_eps1(st.k) == 1) return cplx(0.0);
        return std::nullopt;
    }
    return f0_from_fk(st.k, st.f);
}

namespace detail {

inline auto flow_rhs() {
    return [](double t, const CVec<2>& y) -> CVec<2> { return chart_rhs(std::exp(t), y[0], y[1]); };
}

// Chart with bounded gt among those with |f_j| <= 1; returns -1 if no change is wanted.
inline int choose_chart(const ChartState& st, const FlowOptions& o, bool in_hysteresis) {
    double af = std::abs(st.f);
    if (st.f == cplx(0.0)) return -1;
    FG fg = to_fg(st);
    int best = -1;
    double bestg = 0;
    for (int j = 0; j < 4; ++j) {
        ChartState c = from_fg(st.x, fg.f0, fg.g0, j);
        if (std::abs(c.f) > o.switch_threshold) continue;
        double g = std::abs(c.gt);
        if (!std::isfinite(g)) continue;
        if (best < 0 || g < bestg) {
            best = j;
            bestg = g;
        }
    }
    if (best < 0 || best == st.k) return -1;
    if (af > o.hard_threshold) return best;
    if (in_hysteresis) return -1;
    if (af > o.switch_threshold) return best;
    if (bestg < o.switch_ratio * std::abs(st.gt)) return best;
    return -1;
}

}  // namespace detail

inline Trajectory flow(const ChartState& init, double x_target, const FlowOptions& o = {}) {
    if (!(init.x > 0) || !(x_target > 0))
        throw Error(ErrorKind::Usage, "flow needs positive x");
    auto rhs = detail::flow_rhs();
    Trajectory tr;
    ChartState st = init;
    tr.samples.push_back({st.x, sample_f0(st), st.k, st, false});
    double t = std::log(st.x), t1 = std::log(x_target);
    double dir = t1 >= t ? 1.0 : -1.0;
    double h = dir * std::min(std::abs(t1 - t), 1e-3);
    double last_switch_t = -1e300;
    // the initial chart may be a poor choice
    if (o.allow_switch) {
        int j = detail::choose_chart(st, o, false);
        if (j >= 0) {
            st = chart_convert(st, j);
            ++tr.diagnostics.switches;
            last_switch_t = t;
        }
    }
    if (t == t1) return tr;
    for (int n = 0; n < o.max_steps; ++n) {
        if ((t1 - t) * dir <= 0) break;
        if ((t + h - t1) * dir > 0) h = t1 - t;
        CVec<2> y{st.f, st.gt};
        auto r = dp45_step<2>(rhs, t, y, h);
        double en = error_norm<2>(y, r.y, r.err, o.atol, o.rtol);
        if (!std::isfinite(en) || en > 1.0) {
            ++tr.diagnostics.rejected;
            h *= std::isfinite(en) ? step_factor(en) : 0.2;
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
                throw Error(ErrorKind::StepFailure, "step size underflow at x = " + std::to_string(std::exp(t)));
            continue;
        }
        double tn = (std::abs(t1 - (t + h)) < 1e-14 * std::max(1.0, std::abs(t1))) ? t1 : t + h;
        if (!finite(r.y[0]) || !finite(r.y[1]))
            throw Error(ErrorKind::NonFiniteState, "non-finite state at x = " + std::to_string(std::exp(tn)));
        ++tr.diagnostics.accepted;
        tr.diagnostics.max_error_estimate = std::max(tr.diagnostics.max_error_estimate, en);

        // zero of f_k inside the step
        double r0 = y[0].real(), r1 = r.y[0].real();
        if (o.detect_events && ((r0 < 0 && r1 >= 0) || (r0 > 0 && r1 <= 0)) && r1 != 0.0) {
            double a = 0, b = tn - t, fa = r0, fb = r1;
            double tolh = 1e-13 * std::max(1.0, std::abs(t));
            int side = 0;
            CVec<2> yc = r.y;
            double hc = b;
            for (int it = 0; it < 200 && std::abs(b - a) > tolh; ++it) {
                double c = (a * fb - b * fa) / (fb - fa);
                if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
                yc = dp45_step<2>(rhs, t, y, c).y;
                hc = c;
                double fc = yc[0].real();
                if (fc == 0) {
                    a = b = c;
                    break;
                }
                if ((fc > 0) == (fb > 0)) {
                    b = c;
                    fb = fc;
                    if (side == -1) fa *= 0.5;
                    side = -1;
                } else {
                    a = c;
                    fa = fc;
                    if (side == 1) fb *= 0.5;
                    side = 1;
                }
            }
            // one Newton polish using x d/dx f = rhs
            double xs = std::exp(t + hc);
            auto d = chart_rhs(xs, yc[0], yc[1]);
            if (d[0].real() != 0) {
                double dh = -yc[0].real() / d[0].real();
                if (std::abs(dh) < 1e-6) {
                    hc += dh;
                    yc = dp45_step<2>(rhs, t, y, hc).y;
                    xs = std::exp(t + hc);
                }
            }
            if (std::abs(yc[0]) <= o.event_accept * xs) {
                tr.events.push_back({xs, kind_of_chart(st.k), yc[1]});
                ChartState es{xs, st.k, 0.0, yc[1]};
                tr.samples.push_back({xs, sample_f0(es), st.k, es, true});
            }
        }

        t = tn;
        st = {std::exp(t), st.k, r.y[0], r.y[1]};
        tr.samples.push_back({st.x, sample_f0(st), st.k, st, false});
        if (o.allow_switch) {
            bool hyst = std::abs(t - last_switch_t) < o.hysteresis;
            int j = detail::choose_chart(st, o, hyst);
            if (j >= 0) {
                st = chart_convert(st, j);
                tr.samples.back().state = st;
                tr.samples.back().chart = j;
                ++tr.diagnostics.switches;
                last_switch_t = t;
            }
        }
        h *= step_factor(en);
    }
    if ((t1 - t) * dir > 0) throw Error(ErrorKind::StepFailure, "step budget exhausted");
    return tr;
}

struct EventSeries {
    cplx a1, a2, a3;
};

// Taylor coefficients of f_k at an event.
inline EventSeries event_series(const FlowEvent& ev) {
    double x0 = ev.x;
    return {-2.0, -1.0 / x0, (2.0 / (x0 * x0) + 8.0 * ev.gt_at_event / x0) / 6.0};
}

struct PoleMarker {};

struct SolutionValue {
    std::optional<cplx> f;  // empty at a pole
    bool is_pole() const { return !f.has_value(); }
};

struct SampleOptions {
    double x_seed = 1e-3;
    SeedOptions seed;
    FlowOptions flow;
    double pole_tol = 1e-9;
};

inline SolutionValue sample_solution(const MonodromyPoint& p, double x, const SampleOptions& o = {}) {
    ChartState s0 = seed_state(p, std::min(o.x_seed, x), o.seed);
    Trajectory tr = flow(s0, x, o.flow);
    for (const auto& ev : tr.events)
        if (!is_zero(ev.kind) && std::abs(ev.x - x) <= o.pole_tol * x) return {std::nullopt};
    auto f0 = sample_f0(tr.final_state());
    return {f0};
}

}  // namespace p3
