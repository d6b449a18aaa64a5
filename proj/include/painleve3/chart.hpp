#pragma once

#include <array>

#include "core.hpp"

namespace p3 {

// Point of the space of initial conditions in chart k: (x, f_k, gt_k).
struct ChartState {
    double x = 1.0;
    int k = 0;
    cplx f{1.0};
    cplx gt{};
};

enum class EventKind { ZeroMinus, PoleMinus, ZeroPlus, PolePlus };

inline EventKind kind_of_chart(int k) { return static_cast<EventKind>(k); }

inline const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::ZeroMinus: return "[0-]";
    case EventKind::PoleMinus: return "[inf-]";
    case EventKind::ZeroPlus: return "[0+]";
    case EventKind::PolePlus: return "[inf+]";
    }
    return "?";
}

inline bool is_zero(EventKind k) { return k == EventKind::ZeroMinus || k == EventKind::ZeroPlus; }

// (eps1, eps2): f0 = eps2 * f_k^eps1, g0 = eps1 * g_k
inline int chart_eps1(int k) { return (k == 0 || k == 2) ? 1 : -1; }
inline int chart_eps2(int k) { return (k == 0 || k == 1) ? 1 : -1; }

inline cplx f0_from_fk(int k, cplx fk) {
    cplx v = chart_eps1(k) == 1 ? fk : 1.0 / fk;
    return chart_eps2(k) == 1 ? v : -v;
}

inline cplx fk_from_f0(int k, cplx f0) {
    cplx v = chart_eps2(k) == 1 ? f0 : -f0;
    return chart_eps1(k) == 1 ? v : 1.0 / v;
}

inline cplx g_from_gt(double x, cplx f, cplx gt) { return -x / f + 0.5 + 0.5 * f * gt; }
inline cplx gt_from_g(double x, cplx f, cplx g) { return 2.0 * (g + x / f - 0.5) / f; }

struct FG {
    cplx f0, g0;
};

inline FG to_fg(const ChartState& st) {
    if (st.f == cplx(0.0)) throw Error(ErrorKind::OnSingularLocus, "f_k = 0");
    cplx gk = g_from_gt(st.x, st.f, st.gt);
    return {f0_from_fk(st.k, st.f), double(chart_eps1(st.k)) * gk};
}

inline ChartState from_fg(double x, cplx f0, cplx g0, int k) {
    cplx fk = fk_from_f0(k, f0);
    cplx gk = double(chart_eps1(k)) * g0;
    return {x, k, fk, gt_from_g(x, fk, gk)};
}

inline ChartState chart_convert(const ChartState& st, int k_new) {
    if (st.k == k_new) return st;
    FG fg = to_fg(st);
    return from_fg(st.x, fg.f0, fg.g0, k_new);
}

// x d/dx of (f_k, gt_k); the same polynomial field in every chart.
inline std::array<cplx, 2> chart_rhs(double x, cplx f, cplx gt) {
    return {-2.0 * x + f + f * f * gt, 4.0 * x * x * f - gt - f * gt * gt};
}

inline std::array<cplx, 2> chart_rhs(const ChartState& st) { return chart_rhs(st.x, st.f, st.gt); }

}  // namespace p3
