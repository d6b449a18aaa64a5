#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <string>
#include <vector>

#include "solution.hpp"

namespace p3 {

enum class NearZero { Pos, Neg, ZerosAlt, PolesAlt };
enum class NearInfinity { Pos, Neg, MixMinus, MixPlus };

inline const char* to_string(NearZero z) {
    switch (z) {
    case NearZero::Pos: return "Pos";
    case NearZero::Neg: return "Neg";
    case NearZero::ZerosAlt: return "ZerosAlt";
    case NearZero::PolesAlt: return "PolesAlt";
    }
    return "?";
}

inline const char* to_string(NearInfinity z) {
    switch (z) {
    case NearInfinity::Pos: return "Pos";
    case NearInfinity::Neg: return "Neg";
    case NearInfinity::MixMinus: return "MixMinus";
    case NearInfinity::MixPlus: return "MixPlus";
    }
    return "?";
}

struct RealStratum {
    NearZero near_zero;
    NearInfinity near_infinity;
    bool operator==(const RealStratum&) const = default;
};

inline void require_real(const MonodromyPoint& p, double tol) {
    if (reality_class(p, tol) != RealityClass::RealLine)
        throw Error(ErrorKind::NotRealFamily, "point is not in the real family");
}

inline RealStratum stratum(const MonodromyPoint& p, double tol = 1e-9) {
    require_real(p, tol);
    double s = p.s.real(), b5 = p.b5().real(), b6 = p.b6().real();
    RealStratum r;
    if (s > 2.0 + tol)
        r.near_zero = NearZero::ZerosAlt;
    else if (s < -2.0 - tol)
        r.near_zero = NearZero::PolesAlt;
    else
        // on this range the constraint forces |b5| >= 1, so the sign decides b5 >= 1 versus b5 <= -1
        r.near_zero = b5 > 0 ? NearZero::Pos : NearZero::Neg;
    if (is_plus_minus_identity(p, tol))
        r.near_infinity = p.b1.real() > 0 ? NearInfinity::Pos : NearInfinity::Neg;
    else
        r.near_infinity = b6 < 0 ? NearInfinity::MixMinus : NearInfinity::MixPlus;
    return r;
}

// One side of a split: either event-free with a fixed sign, or an alternation of two kinds.
// Near 0 the largest event has kind `second`; near infinity the smallest has kind `first`.
struct Tail {
    bool alternating = false;
    int sign = 1;
    EventKind first{}, second{};
};

struct Splitting {
    Tail left, right;
    std::string label;
};

struct PredictedPattern {
    std::string label;                 // as printed in the tables
    std::vector<Splitting> splittings; // what is checked
    bool printed_phase = true;         // false when the checked near-infinity phase differs from the print
};

namespace detail {

inline std::string kind_label(EventKind k) {
    switch (k) {
    case EventKind::ZeroMinus: return "[0-]";
    case EventKind::PoleMinus: return "[∞-]";
    case EventKind::ZeroPlus: return "[0+]";
    case EventKind::PolePlus: return "[∞+]";
    }
    return "?";
}

inline std::string tail_label(const Tail& t, bool left) {
    std::string arrow = left ? "←" : "→";
    if (!t.alternating) return arrow + (t.sign > 0 ? ">0" : "<0");
    return arrow + kind_label(t.first) + kind_label(t.second);
}

inline Tail empty_tail(int sign) { return {false, sign, {}, {}}; }
inline Tail alt(EventKind a, EventKind b) { return {true, 0, a, b}; }

inline Splitting split(Tail l, Tail r) { return {l, r, tail_label(l, true) + " & " + tail_label(r, false)}; }

}  // namespace detail

inline PredictedPattern predicted_sequence(const RealStratum& st) {
    using detail::alt;
    using detail::empty_tail;
    using detail::split;
    const auto Zm = EventKind::ZeroMinus, Zp = EventKind::ZeroPlus, Pm = EventKind::PoleMinus,
               Pp = EventKind::PolePlus;
    PredictedPattern pp;
    auto one = [&](Splitting s) {
        pp.label = s.label;
        pp.splittings = {s};
    };
    auto two = [&](Splitting a, Splitting b) {
        pp.label = a.label + " or " + b.label;
        pp.splittings = {a, b};
    };
    bool small = st.near_zero == NearZero::Pos || st.near_zero == NearZero::Neg;
    if (small) {
        int sg = st.near_zero == NearZero::Pos ? 1 : -1;
        Tail L = empty_tail(sg);
        switch (st.near_infinity) {
        case NearInfinity::Pos: one(split(L, empty_tail(1))); break;
        case NearInfinity::Neg: one(split(L, empty_tail(-1))); break;
        case NearInfinity::MixMinus:
        case NearInfinity::MixPlus: {
            // the printed rows give the pair in the order opposite to the one a sign change
            // after a positive (negative) stretch allows; the label is kept, the check uses the
            // order compatible with the sign of f before the first event
            bool minus = st.near_infinity == NearInfinity::MixMinus;
            Tail printed, checked;
            if (sg > 0) {
                printed = minus ? alt(Pp, Zm) : alt(Zp, Pm);
                checked = minus ? alt(Zm, Pp) : alt(Pm, Zp);
            } else {
                printed = minus ? alt(Zm, Pp) : alt(Pm, Zp);
                checked = minus ? alt(Pp, Zm) : alt(Zp, Pm);
            }
            Splitting s = split(L, checked);
            pp.label = split(L, printed).label;
            pp.splittings = {s};
            pp.printed_phase = false;
            break;
        }
        }
        return pp;
    }
    bool zeros = st.near_zero == NearZero::ZerosAlt;
    EventKind m = zeros ? Zm : Pm, p = zeros ? Zp : Pp;
    switch (st.near_infinity) {
    case NearInfinity::Pos: one(split(alt(m, p), empty_tail(1))); break;
    case NearInfinity::Neg: one(split(alt(p, m), empty_tail(-1))); break;
    case NearInfinity::MixMinus: two(split(alt(m, p), alt(Zm, Pp)), split(alt(p, m), alt(Pp, Zm))); break;
    case NearInfinity::MixPlus: two(split(alt(m, p), alt(Pm, Zp)), split(alt(p, m), alt(Zp, Pm))); break;
    }
    return pp;
}

inline std::string stratum_label(const RealStratum& st) { return predicted_sequence(st).label; }

struct VerifyOptions {
    double min_decades = 2.0;  // event-free sides must extend this far beyond y0's neighbours
    int min_tail_events = 2;   // alternating sides need at least this many events
};

struct SplitMatch {
    int splitting = 0;   // index into PredictedPattern::splittings
    int split_index = 0; // events [0, split_index) lie below y0
    double y0 = 0;
};

struct VerifyReport {
    std::vector<EventKind> observed;
    std::vector<double> observed_x;
    bool match = false;
    bool mixed_zone = true;
    std::vector<SplitMatch> splits;
    std::optional<double> y0;
    std::vector<std::string> diagnostics;
    bool single_split_per_splitting = false;
};

namespace detail {

inline bool alternates_down(const std::vector<EventKind>& e, int lo, int hi, EventKind a, EventKind b) {
    // e[hi-1] == b, e[hi-2] == a, ...
    for (int i = hi - 1, j = 0; i >= lo; --i, ++j)
        if (e[i] != (j % 2 == 0 ? b : a)) return false;
    return true;
}

inline bool alternates_up(const std::vector<EventKind>& e, int lo, int hi, EventKind a, EventKind b) {
    for (int i = lo, j = 0; i < hi; ++i, ++j)
        if (e[i] != (j % 2 == 0 ? a : b)) return false;
    return true;
}

inline bool sign_ok(const Trajectory& tr, double lo, double hi, int sign) {
    for (const auto& s : tr.samples) {
        if (s.x <= lo || s.x >= hi || s.event_flag || !s.f0) continue;
        double v = s.f0->real();
        if (sign > 0 ? !(v > 0) : !(v < 0)) return false;
    }
    return true;
}

}  // namespace detail

inline VerifyReport verify_trajectory(const Trajectory& tr, const RealStratum& st, const VerifyOptions& o = {}) {
    VerifyReport rep;
    if (tr.samples.empty()) throw Error(ErrorKind::InsufficientSpan, "empty trajectory");
    double xlo = 1e300, xhi = 0;
    for (const auto& s : tr.samples) {
        xlo = std::min(xlo, s.x);
        xhi = std::max(xhi, s.x);
    }
    std::vector<FlowEvent> ev = tr.events;
    std::sort(ev.begin(), ev.end(), [](const FlowEvent& a, const FlowEvent& b) { return a.x < b.x; });
    for (const auto& e : ev) {
        rep.observed.push_back(e.kind);
        rep.observed_x.push_back(e.x);
    }
    const int n = int(ev.size());
    const double span = std::pow(10.0, o.min_decades);
    PredictedPattern pat = predicted_sequence(st);
    bool structural = false;
    for (int j = 0; j < int(pat.splittings.size()); ++j) {
        const Splitting& sp = pat.splittings[j];
        int count = 0;
        for (int i = 0; i <= n; ++i) {
            const Tail &L = sp.left, &R = sp.right;
            if (L.alternating ? (i == 0 || !detail::alternates_down(rep.observed, 0, i, L.first, L.second)) : i != 0)
                continue;
            if (R.alternating ? (i == n || !detail::alternates_up(rep.observed, i, n, R.first, R.second)) : i != n)
                continue;
            double lo = i > 0 ? ev[i - 1].x : xlo, hi = i < n ? ev[i].x : xhi;
            if (!L.alternating && !detail::sign_ok(tr, xlo, hi, L.sign)) continue;
            if (!R.alternating && !detail::sign_ok(tr, lo, xhi, R.sign)) continue;
            structural = true;
            // span: event-free sides must be long enough, alternating sides need enough events
            bool enough = true;
            if (L.alternating) enough &= i >= o.min_tail_events;
            if (R.alternating) enough &= n - i >= o.min_tail_events;
            double y0;
            if (n == 0) {
                y0 = std::sqrt(xlo * xhi);
                enough &= xhi / xlo >= span * span;
            } else if (i == 0) {
                y0 = std::sqrt(xlo * hi);
                enough &= hi / xlo >= span;
            } else if (i == n) {
                y0 = std::sqrt(lo * xhi);
                enough &= xhi / lo >= span;
            } else {
                y0 = std::sqrt(lo * hi);
            }
            if (!enough) {
                rep.diagnostics.push_back("split at index " + std::to_string(i) + " of splitting " +
                                          std::to_string(j) + " lacks span or tail events");
                continue;
            }
            rep.splits.push_back({j, i, y0});
            ++count;
        }
        if (j == 0) rep.single_split_per_splitting = count <= 1;
        else rep.single_split_per_splitting = rep.single_split_per_splitting && count <= 1;
    }
    if (!rep.splits.empty()) {
        rep.match = true;
        rep.mixed_zone = false;
        rep.y0 = rep.splits.front().y0;
        return rep;
    }
    if (structural) throw Error(ErrorKind::InsufficientSpan, "trajectory too short to establish the pattern");
    rep.diagnostics.push_back("observed sequence does not embed into " + pat.label);
    return rep;
}

struct TerpStatus {
    bool pure = false, polarized = false, nilpotent_orbit = false, sabbah_orbit = false;
};

inline TerpStatus terp_status(const MonodromyPoint& p, double x, const SolutionValue& v, double tol = 1e-9) {
    require_real(p, tol);
    (void)x;
    TerpStatus t;
    t.pure = v.f.has_value() && *v.f != cplx(0.0);
    t.polarized = t.pure && v.f->real() > 0;
    t.nilpotent_orbit = std::abs(p.b2) <= tol && std::abs(p.b1 - 1.0) <= tol;
    t.sabbah_orbit = std::abs(p.s.real()) <= 2.0 + tol && p.b5().real() >= 1.0 - tol;
    return t;
}

enum class GordonFamily { SinhPlus, SinhMinus, Sine };

inline const char* to_string(GordonFamily g) {
    switch (g) {
    case GordonFamily::SinhPlus: return "SinhPlus";
    case GordonFamily::SinhMinus: return "SinhMinus";
    case GordonFamily::Sine: return "Sine";
    }
    return "?";
}

struct GordonPoint {
    double x;
    double x_NI;  // 4x
    cplx u;
};

// phi = 2 log f, psi = 2 log f - i pi, u = 2 i log f + pi, unwrapped along the list
inline std::vector<GordonPoint> gordon_translate(const std::vector<std::pair<double, cplx>>& values,
                                                 GordonFamily fam, double tol = 1e-8) {
    std::vector<GordonPoint> out;
    std::optional<cplx> prev;
    for (const auto& [x, f] : values) {
        bool ok = false;
        switch (fam) {
        case GordonFamily::SinhPlus: ok = std::abs(f.imag()) <= tol * std::max(1.0, std::abs(f)) && f != cplx(0.0); break;
        case GordonFamily::SinhMinus: ok = std::abs(f.real()) <= tol * std::max(1.0, std::abs(f)) && f.imag() > 0; break;
        case GordonFamily::Sine: ok = std::abs(std::abs(f) - 1.0) <= tol; break;
        }
        if (!ok) throw Error(ErrorKind::FamilyMismatch, std::string("value outside the ") + to_string(fam) + " family");
        cplx L = std::log(f);
        cplx u;
        cplx period;
        switch (fam) {
        case GordonFamily::SinhPlus: u = 2.0 * L; period = cplx(0, 4 * pi); break;
        case GordonFamily::SinhMinus: u = 2.0 * L - I_unit * pi; period = cplx(0, 4 * pi); break;
        case GordonFamily::Sine: u = 2.0 * I_unit * L + pi; period = cplx(4 * pi, 0); break;
        }
        if (prev) {
            double k = std::round(((*prev - u) / period).real());
            u += k * period;
        }
        prev = u;
        out.push_back({x, 4 * x, u});
    }
    return out;
}

inline std::vector<std::pair<double, cplx>> gordon_inverse(const std::vector<GordonPoint>& pts, GordonFamily fam) {
    std::vector<std::pair<double, cplx>> out;
    for (const auto& p : pts) {
        cplx f;
        switch (fam) {
        case GordonFamily::SinhPlus: f = std::exp(0.5 * p.u); break;
        case GordonFamily::SinhMinus: f = std::exp(0.5 * (p.u + I_unit * pi)); break;
        case GordonFamily::Sine: f = std::exp((p.u - pi) / (2.0 * I_unit)); break;
        }
        out.push_back({p.x, f});
    }
    return out;
}

// ------------------------------------------------------------------ sheets

struct SheetNode {
    double s, b5, b6;
};

struct SheetRow {
    double s, b5, b6;
    int k;
    double x_k;
    EventKind kind;
    bool continuity_break = false;
};

struct SheetOptions {
    double x_min = 1e-6;
    double x_max = 20.0;
    double break_ratio = 0.5;  // |log x_k - log x_k(previous node)| above this flags a break
    TrajectoryOptions traj{};
    VerifyOptions verify{};
    int jobs = 1;
};

// x-location of the event with index k relative to the split point: k >= 1 counts events above y0,
// k <= 0 counts events below it (k = 0 is the largest event below y0).
inline std::optional<SheetRow> sheet_point(const SheetNode& nd, int k, const SheetOptions& o) {
    MonodromyPoint p = from_real_form(nd.s, nd.b5, nd.b6, 1e-8);
    RealStratum st = stratum(p);
    Trajectory tr = trajectory(p, o.x_min, o.x_max, o.traj);
    VerifyReport rep = verify_trajectory(tr, st, o.verify);
    if (rep.observed.empty()) return std::nullopt;
    if (!rep.match) throw Error(ErrorKind::EventNotFound, "trajectory does not match its stratum");
    int i0 = rep.splits.front().split_index;
    int idx = k >= 1 ? i0 + k - 1 : i0 - 1 + k;
    if (idx < 0 || idx >= int(rep.observed.size()))
        throw Error(ErrorKind::EventNotFound, "event index " + std::to_string(k) + " outside the computed range");
    return SheetRow{nd.s, nd.b5, nd.b6, k, rep.observed_x[idx], rep.observed[idx], false};
}

inline std::vector<SheetRow> sheet_trace(const std::vector<SheetNode>& grid, int k, const SheetOptions& o = {}) {
    std::vector<std::optional<SheetRow>> res(grid.size());
    std::vector<std::exception_ptr> err(grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < grid.size();) {
            try {
                res[i] = sheet_point(grid[i], k, o);
            } catch (...) {
                err[i] = std::current_exception();
            }
        }
    };
    int jobs = std::max(1, std::min<int>(o.jobs, int(grid.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    // continuity pass in grid order
    std::vector<SheetRow> rows;
    std::optional<double> prev;
    for (auto& r : res) {
        if (!r) {
            prev.reset();
            continue;
        }
        if (prev && std::abs(std::log(r->x_k) - std::log(*prev)) > o.break_ratio) r->continuity_break = true;
        prev = r->x_k;
        rows.push_back(*r);
    }
    return rows;
}

}  // namespace p3
