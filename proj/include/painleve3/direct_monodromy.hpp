#pragma once

#include <vector>

#include "chart.hpp"
#include "monodromy_space.hpp"
#include "ode.hpp"

namespace p3 {

// z dz Y = Y M(z), rows of Y are solutions.
struct LinearSystem {
    double x = 1.0;
    cplx f0{1.0}, g0{};

    Mat2 M(cplx z) const {
        cplx a = 1.0 / (f0 * f0), b = f0 * f0;
        return Mat2{0.0, x / z, x / z, 0.0} + Mat2{-g0, 0.0, 0.0, g0} + Mat2{0.0, -x * z * a, -x * z * b, 0.0};
    }
};

inline LinearSystem linear_system(const ChartState& st) {
    if (st.f == cplx(0.0)) throw Error(ErrorKind::OnSingularLocus, "linear system needs f_k != 0");
    if (!(st.x > 0)) throw Error(ErrorKind::Usage, "linear system needs x > 0");
    FG fg = to_fg(st);
    if (fg.f0 == cplx(0.0) || !finite(fg.f0) || !finite(fg.g0))
        throw Error(ErrorKind::OnSingularLocus, "f0 is 0 or infinite");
    return {st.x, fg.f0, fg.g0};
}

enum class Location { Zero, Infinity };

inline const Mat2& C_matrix() {
    static const Mat2 C{1.0, 1.0, -I_unit, I_unit};
    return C;
}

// Formal gauge: Y = E(z) A(u) C G with u = z at zero (E = diag(e^{-x/z}, e^{x/z}), G = 1) and
// u = 1/z at infinity (E = diag(e^{-xz}, e^{xz}), G = diag(f0, 1/f0)). A(u) = sum A_k u^k, A_0 = 1.
struct FormalSeries {
    Location location;
    double x;
    std::vector<Mat2> A;
    Mat2 N0, N1;
    double recursion_residual = 0;

    Mat2 eval(cplx u) const {
        Mat2 r{};
        for (int k = int(A.size()) - 1; k >= 0; --k) r = r * u + A[k];
        return r;
    }
};

inline FormalSeries formal_gauge_series(const LinearSystem& sys, Location loc, int N) {
    const Mat2& C = C_matrix();
    Mat2 Ci = C.inverse();
    cplx a = 1.0 / (sys.f0 * sys.f0), b = sys.f0 * sys.f0;
    FormalSeries fs;
    fs.location = loc;
    fs.x = sys.x;
    const double x = sys.x;
    if (loc == Location::Zero) {
        fs.N0 = C * Mat2{-sys.g0, 0.0, 0.0, sys.g0} * Ci;
        fs.N1 = C * Mat2{0.0, -x * a, -x * b, 0.0} * Ci;
    } else {
        fs.N0 = C * Mat2{sys.g0, 0.0, 0.0, -sys.g0} * Ci;
        fs.N1 = C * Mat2{0.0, -x * b, -x * a, 0.0} * Ci;
    }
    // (x/u) L A + u A' = (x/u) A L + A (N0 + u N1), L = diag(1, -1)
    fs.A.assign(N + 1, Mat2{});
    fs.A[0] = Mat2::identity();
    for (int k = 0; k < N; ++k) {
        const Mat2& Ak = fs.A[k];
        Mat2 prev = k > 0 ? fs.A[k - 1] : Mat2{};
        Mat2 R = Ak * double(k) - Ak * fs.N0 - prev * fs.N1;
        Mat2& An = fs.A[k + 1];
        An.b = -R.b / (2.0 * x);
        An.c = R.c / (2.0 * x);
        Mat2 AN1 = Ak * fs.N1;
        An.a = (An.b * fs.N0.c + AN1.a) / double(k + 1);
        An.d = (An.c * fs.N0.b + AN1.d) / double(k + 1);
    }
    // full residual of the order-k relation for k < N (the diagonal of order N is not closed)
    Mat2 L{1.0, 0.0, 0.0, -1.0};
    for (int k = 0; k + 1 < N; ++k) {
        Mat2 prev = k > 0 ? fs.A[k - 1] : Mat2{};
        Mat2 res = (L * fs.A[k + 1] - fs.A[k + 1] * L) * x + fs.A[k] * double(k) - fs.A[k] * fs.N0 - prev * fs.N1;
        fs.recursion_residual = std::max(fs.recursion_residual, res.max_abs());
    }
    return fs;
}

// Row solution stored as exp(log_scale) * v.
struct ScaledRow {
    Row2 v{};
    cplx log_scale{};
};

struct TransportOptions {
    double rtol = 1e-12;
    TransportStats* stats = nullptr;
};

// along the ray arg z = theta from radius r0 to r1
inline ScaledRow transport_radial(const LinearSystem& sys, ScaledRow y, double theta, double r0, double r1,
                                  const TransportOptions& o = {}) {
    cplx e = std::polar(1.0, theta);
    auto rhs = [&](double t, const CVec<2>& v) -> CVec<2> {
        Row2 r = Row2{v[0], v[1]} * sys.M(std::exp(t) * e);
        return {r[0], r[1]};
    };
    CVec<2> v{y.v[0], y.v[1]};
    v = integrate_linear<2>(rhs, std::log(r0), std::log(r1), v, o.rtol, y.log_scale, o.stats);
    return {{v[0], v[1]}, y.log_scale};
}

// along |z| = rho from angle th0 to th1
inline ScaledRow transport_arc(const LinearSystem& sys, ScaledRow y, double rho, double th0, double th1,
                               const TransportOptions& o = {}) {
    auto rhs = [&](double th, const CVec<2>& v) -> CVec<2> {
        Row2 r = Row2{v[0], v[1]} * sys.M(std::polar(rho, th));
        return {I_unit * r[0], I_unit * r[1]};
    };
    CVec<2> v{y.v[0], y.v[1]};
    v = integrate_linear<2>(rhs, th0, th1, v, o.rtol, y.log_scale, o.stats);
    return {{v[0], v[1]}, y.log_scale};
}

struct SectorFrame {
    Location location;
    int sign;  // +1 or -1
    cplx base_z;
    std::array<ScaledRow, 2> rows;
    double transport_residual = 0;

    // the frame matrix with row scales applied (may overflow for large scales)
    Mat2 frame() const {
        cplx e1 = std::exp(rows[0].log_scale), e2 = std::exp(rows[1].log_scale);
        return {e1 * rows[0].v[0], e1 * rows[0].v[1], e2 * rows[1].v[0], e2 * rows[1].v[1]};
    }
};

// coefficients of the rows of P in the basis of rows of Q, computed from scaled rows
inline Mat2 relate(const std::array<ScaledRow, 2>& P, const std::array<ScaledRow, 2>& Q) {
    Mat2 VQ = from_rows(Q[0].v, Q[1].v);
    if (std::abs(VQ.det()) < 1e-300) throw Error(ErrorKind::FrameDegenerate, "degenerate frame");
    Mat2 Qi = VQ.inverse();
    Mat2 out;
    for (int i = 0; i < 2; ++i) {
        Row2 c = P[i].v * Qi;
        for (int j = 0; j < 2; ++j) {
            cplx sc = std::exp(P[i].log_scale - Q[j].log_scale);
            cplx v = sc * c[j];
            if (i == 0 && j == 0) out.a = v;
            if (i == 0 && j == 1) out.b = v;
            if (i == 1 && j == 0) out.c = v;
            if (i == 1 && j == 1) out.d = v;
        }
    }
    return out;
}

struct StokesOptions {
    int order = 6;
    double rho = 1.0;                 // circle carrying the base points +-i rho
    std::optional<double> r_zero;     // default min(0.05, 0.05/x)
    std::optional<double> r_infinity; // default max(20, 20/x)
    double stability_tol = 1e-7;      // frames must agree after halving/doubling the radii
    int max_refinements = 4;
    double rtol = 1e-12;
};

struct StokesOutput {
    cplx s;
    MonodromyPoint B;
    Mat2 B_raw, Sa_raw, Sb_raw;
    double beta = 0;
    double residual_structure = 0;
    double residual_transport = 0;
    double residual_stokes = 0;  // |S^b - (S^a)^t| and off-triangular parts
    std::pair<double, double> radii_used{};
};

namespace detail {

struct FrameSet {
    SectorFrame plus0, minus0, minus_inf;
    double series_residual = 0;
};

inline ScaledRow start_row(const FormalSeries& fs, const LinearSystem& sys, int row, cplx z) {
    const Mat2& C = C_matrix();
    Mat2 Y;
    cplx e;
    if (fs.location == Location::Zero) {
        Y = fs.eval(z) * C;
        e = row == 0 ? -sys.x / z : sys.x / z;
    } else {
        Mat2 G{sys.f0, 0.0, 0.0, 1.0 / sys.f0};
        Y = fs.eval(1.0 / z) * C * G;
        e = row == 0 ? -sys.x * z : sys.x * z;
    }
    Row2 v = row == 0 ? Row2{Y.a, Y.b} : Row2{Y.c, Y.d};
    double n = std::max(std::abs(v[0]), std::abs(v[1]));
    return {{v[0] / n, v[1] / n}, e + std::log(n)};
}

inline FrameSet frames(const LinearSystem& sys, double r0, double rinf, const StokesOptions& o,
                       TransportStats* st) {
    TransportOptions to{o.rtol, st};
    const double rho = o.rho;
    FormalSeries s0 = formal_gauge_series(sys, Location::Zero, o.order);
    FormalSeries si = formal_gauge_series(sys, Location::Infinity, o.order);
    // recessive rows: first row on arg z = 0, second on arg z = pi
    ScaledRow r1 = transport_radial(sys, start_row(s0, sys, 0, r0), 0.0, r0, rho, to);
    ScaledRow r2 = transport_radial(sys, start_row(s0, sys, 1, -r0), pi, r0, rho, to);
    ScaledRow R1 = transport_radial(sys, start_row(si, sys, 0, rinf), 0.0, rinf, rho, to);
    ScaledRow R2 = transport_radial(sys, start_row(si, sys, 1, -rinf), pi, rinf, rho, to);
    FrameSet fsout;
    fsout.series_residual = std::max(s0.recursion_residual, si.recursion_residual);
    fsout.plus0 = {Location::Zero, +1, cplx(0, rho),
                   {transport_arc(sys, r1, rho, 0.0, pi / 2, to), transport_arc(sys, r2, rho, pi, pi / 2, to)}};
    fsout.minus0 = {Location::Zero, -1, cplx(0, -rho),
                    {transport_arc(sys, r1, rho, 0.0, -pi / 2, to), transport_arc(sys, r2, rho, pi, 3 * pi / 2, to)}};
    fsout.minus_inf = {Location::Infinity, -1, cplx(0, rho),
                       {transport_arc(sys, R1, rho, 0.0, pi / 2, to), transport_arc(sys, R2, rho, pi, pi / 2, to)}};
    return fsout;
}

inline std::array<ScaledRow, 2> carry(const LinearSystem& sys, const std::array<ScaledRow, 2>& rows, double rho,
                                      double th0, double th1, const TransportOptions& to) {
    return {transport_arc(sys, rows[0], rho, th0, th1, to), transport_arc(sys, rows[1], rho, th0, th1, to)};
}

struct RawData {
    Mat2 Sa, Sb, B;
};

inline RawData raw_data(const LinearSystem& sys, const FrameSet& F, const StokesOptions& o, TransportStats* st) {
    TransportOptions to{o.rtol, st};
    const double rho = o.rho;
    // minus frame brought to i rho through -rho (side a) and through +rho (side b)
    auto via_a = carry(sys, F.minus0.rows, rho, -pi / 2, -3 * pi / 2, to);
    auto via_b = carry(sys, F.minus0.rows, rho, -pi / 2, pi / 2, to);
    RawData r;
    r.Sa = relate(F.plus0.rows, via_a);
    r.Sb = relate(F.plus0.rows, via_b);
    r.B = relate(F.plus0.rows, F.minus_inf.rows);
    return r;
}

inline double distance(const RawData& a, const RawData& b) {
    return std::max({(a.Sa - b.Sa).max_abs(), (a.Sb - b.Sb).max_abs(), (a.B - b.B).max_abs()});
}

}  // namespace detail

// Project a raw connection matrix onto the shape [[b1, b2], [-b2, b1 + s b2]] with det 1.
inline std::pair<MonodromyPoint, double> project_connection(cplx s, const Mat2& Braw) {
    cplx b2 = 0.5 * (Braw.b - Braw.c);
    cplx b1 = 0.5 * (Braw.a + Braw.d - s * b2);
    MonodromyPoint p{s, b1, b2, 0};
    double shape = (p.B() - Braw).max_abs();
    cplx q = b1 * b1 + b2 * b2 + s * b1 * b2;
    double detdev = std::abs(Braw.det() - 1.0);
    cplx sc = std::sqrt(q);
    p.b1 /= sc;
    p.b2 /= sc;
    p.residual = constraint_residual(p.s, p.b1, p.b2);
    return {p, std::max(shape, detdev)};
}

// One of the four sector frames with the series evaluated at radius r (|z| = r at zero, |z| = r at infinity).
// The frame at sign + of infinity is based at -i rho; the other three at +-i rho as in stokes_data.
inline SectorFrame sector_frame(const LinearSystem& sys, Location loc, int sign, double r, const StokesOptions& o = {}) {
    auto build = [&](double rr) {
        TransportStats st;
        TransportOptions to{o.rtol, &st};
        const double rho = o.rho;
        if (loc == Location::Zero) {
            auto F = detail::frames(sys, rr, std::max(20.0, 20.0 / sys.x), o, &st);
            SectorFrame f = sign > 0 ? F.plus0 : F.minus0;
            return f;
        }
        FormalSeries si = formal_gauge_series(sys, Location::Infinity, o.order);
        ScaledRow R1 = transport_radial(sys, detail::start_row(si, sys, 0, rr), 0.0, rr, rho, to);
        ScaledRow R2 = transport_radial(sys, detail::start_row(si, sys, 1, -rr), pi, rr, rho, to);
        SectorFrame f;
        if (sign < 0)
            f = {loc, -1, cplx(0, rho), {transport_arc(sys, R1, rho, 0.0, pi / 2, to), transport_arc(sys, R2, rho, pi, pi / 2, to)}};
        else
            f = {loc, +1, cplx(0, -rho),
                 {transport_arc(sys, R1, rho, 0.0, -pi / 2, to), transport_arc(sys, R2, rho, pi, 3 * pi / 2, to)}};
        return f;
    };
    SectorFrame a = build(r);
    SectorFrame b = build(loc == Location::Zero ? r / 2 : r * 2);
    Mat2 m = relate(a.rows, b.rows);
    double change = (m - Mat2::identity()).max_abs();
    if (change > o.stability_tol)
        throw Error(ErrorKind::AsymptoticMismatch, "sector frame depends on the radius (change " + std::to_string(change) + ")");
    b.transport_residual = change;
    return b;
}

inline StokesOutput stokes_data(const LinearSystem& sys, const StokesOptions& o = {}) {
    const double x = sys.x;
    double r0 = o.r_zero ? *o.r_zero : std::min(0.05, 0.05 / x);
    double ri = o.r_infinity ? *o.r_infinity : std::max(20.0, 20.0 / x);
    TransportStats st;
    auto F = detail::frames(sys, r0, ri, o, &st);
    auto raw = detail::raw_data(sys, F, o, &st);
    double change = 0;
    bool stable = false;
    for (int it = 0; it < o.max_refinements; ++it) {
        double r0n = r0 / 2, rin = ri * 2;
        auto F2 = detail::frames(sys, r0n, rin, o, &st);
        auto raw2 = detail::raw_data(sys, F2, o, &st);
        change = detail::distance(raw, raw2);
        r0 = r0n;
        ri = rin;
        F = F2;
        raw = raw2;
        if (change <= o.stability_tol * std::max(1.0, raw.B.max_abs())) {
            stable = true;
            break;
        }
    }
    if (!stable)
        throw Error(ErrorKind::AsymptoticMismatch,
                    "frames not stable under radius refinement (change " + std::to_string(change) + ")");
    StokesOutput out;
    out.Sa_raw = raw.Sa;
    out.Sb_raw = raw.Sb;
    out.B_raw = raw.B;
    out.s = raw.Sa.b;
    out.beta = -2.0 * std::log(2.0 * x);
    out.residual_stokes = std::max({std::abs(raw.Sa.a - 1.0), std::abs(raw.Sa.d - 1.0), std::abs(raw.Sa.c),
                                    (raw.Sb - raw.Sa.transpose()).max_abs()});
    auto [p, dev] = project_connection(out.s, raw.B);
    out.B = p;
    out.residual_structure = dev;
    out.residual_transport = std::max(change, F.series_residual);
    out.radii_used = {r0, ri};
    return out;
}

inline StokesOutput stokes_data(const ChartState& st, const StokesOptions& o = {}) {
    return stokes_data(linear_system(st), o);
}

}  // namespace p3
