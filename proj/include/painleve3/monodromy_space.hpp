#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "core.hpp"

namespace p3 {

// Point (s, b1, b2) of the monodromy surface; B = [[b1, b2], [-b2, b1 + s b2]].
struct MonodromyPoint {
    cplx s{}, b1{1.0}, b2{};
    double residual = 0;

    Mat2 B() const { return {b1, b2, -b2, b1 + s * b2}; }
    cplx b5() const { return b1 + 0.5 * s * b2; }
    cplx b6() const { return I_unit * b2; }
};

inline double constraint_residual(cplx s, cplx b1, cplx b2) {
    return std::abs(b1 * b1 + b2 * b2 + s * b1 * b2 - 1.0);
}

inline MonodromyPoint make_point(cplx s, cplx b1, cplx b2, double tol = 1e-10) {
    double r = constraint_residual(s, b1, b2);
    if (!(r <= tol))
        throw Error(ErrorKind::ConstraintViolation,
                    "b1^2 + b2^2 + s b1 b2 - 1 has modulus " + std::to_string(r));
    return {s, b1, b2, r};
}

// Real-form coordinates: b5 = b1 + s b2 / 2, b6 = i b2.
inline MonodromyPoint from_real_form(cplx s, cplx b5, cplx b6, double tol = 1e-10) {
    cplx b2 = -I_unit * b6;
    return make_point(s, b5 - 0.5 * s * b2, b2, tol);
}

// sqrt(s^2/4 - 1) with argument in [0, pi).
inline cplx sqrt_branch(cplx s) {
    cplx w = std::sqrt(0.25 * s * s - 1.0);
    if (w == cplx(0.0)) return 0.0;
    // principal sqrt has arg in (-pi/2, pi/2]; flip the lower half plane
    if (w.imag() < 0 || (w.imag() == 0 && w.real() < 0)) w = -w;
    return w;
}

struct SpectralData {
    cplx s;
    cplx sqrt_disc;
    cplx lambda_plus, lambda_minus;
    cplx alpha_plus, alpha_minus;
    std::array<cplx, 2> v_plus{}, v_minus{};
    std::optional<double> t_NI;
    bool jordan_flag = false;
};

inline bool on_real_ray_beyond_2(cplx s, double tol) {
    return std::abs(s.imag()) <= tol && std::abs(s.real()) > 2.0 - tol;
}

inline SpectralData spectral(cplx s, double tol = 1e-12) {
    SpectralData d;
    d.s = s;
    d.sqrt_disc = sqrt_branch(s);
    d.lambda_plus = (1.0 - 0.5 * s * s) + s * d.sqrt_disc;
    d.lambda_minus = (1.0 - 0.5 * s * s) - s * d.sqrt_disc;
    bool real_ray = on_real_ray_beyond_2(s, tol);
    d.jordan_flag = real_ray && std::abs(std::abs(s.real()) - 2.0) <= tol;
    if (d.jordan_flag) {
        double sg = s.real() > 0 ? 1.0 : -1.0;
        d.sqrt_disc = 0.0;
        d.lambda_plus = d.lambda_minus = -1.0;
        d.alpha_plus = -0.5 * sg;
        d.alpha_minus = 0.5 * sg;
    } else if (real_ray) {
        double sg = s.real() > 0 ? 1.0 : -1.0;
        double t = std::log(std::abs(d.lambda_minus)) / (2 * pi);
        d.alpha_minus = cplx(0.5 * sg, t);
        d.alpha_plus = -d.alpha_minus;
    } else {
        // sin(pi alpha_-) = s/2 with Re in (-1/2, 1/2)
        d.alpha_minus = std::asin(0.5 * s) / pi;
        d.alpha_plus = -d.alpha_minus;
    }
    double lm = std::abs(d.lambda_minus);
    if (std::abs(lm - 1.0) > tol) d.t_NI = std::log(lm) / (2 * pi);
    if (!d.jordan_flag) {
        d.v_plus = {1.0, -d.sqrt_disc + 0.5 * s};
        d.v_minus = {1.0, d.sqrt_disc + 0.5 * s};
    }
    return d;
}

struct EigenData {
    std::optional<cplx> b_plus, b_minus;
    std::optional<cplx> b_tilde1;
    std::optional<cplx> delta_NI;
};

inline EigenData eigen_data(const MonodromyPoint& p, double tol = 1e-12) {
    SpectralData sd = spectral(p.s, tol);
    EigenData e;
    if (sd.jordan_flag) {
        e.b_tilde1 = p.b5();
        return e;
    }
    e.b_minus = p.b5() + sd.sqrt_disc * p.b2;
    e.b_plus = p.b5() - sd.sqrt_disc * p.b2;
    if (std::abs(*e.b_minus) > 0) {
        cplx bm = *e.b_minus;
        e.delta_NI = cplx(arg_0_2pi(bm), -std::log(std::abs(bm)));
    }
    return e;
}

inline Mat2 mon0(cplx s) { return {1.0, -s, s, 1.0 - s * s}; }
inline Mat2 stokes_S(cplx s) { return {1.0, s, 0.0, 1.0}; }
inline Mat2 T_matrix(cplx s) { return {0.0, 1.0, -1.0, s}; }

inline std::pair<Mat2, Mat2> structure_matrices(cplx s) { return {mon0(s), T_matrix(s)}; }

enum class Symmetry { R1, R2, R3, R4, R5, M1, M1_inv };

inline const char* to_string(Symmetry s) {
    switch (s) {
    case Symmetry::R1: return "R1";
    case Symmetry::R2: return "R2";
    case Symmetry::R3: return "R3";
    case Symmetry::R4: return "R4";
    case Symmetry::R5: return "R5";
    case Symmetry::M1: return "M1";
    case Symmetry::M1_inv: return "M1_inv";
    }
    return "?";
}

inline std::pair<cplx, MonodromyPoint> apply_symmetry(Symmetry sym, cplx xi, const MonodromyPoint& p) {
    const cplx s = p.s, b1 = p.b1, b2 = p.b2;
    cplx xi2 = xi, s2 = s, c1 = b1, c2 = b2;
    switch (sym) {
    case Symmetry::R1: s2 = -s; c2 = -b2; break;
    case Symmetry::R2: c1 = -b1; c2 = -b2; break;
    case Symmetry::R3: s2 = -s; c1 = -b1; break;
    case Symmetry::R4:
        // B -> T(s) B
        xi2 = xi + I_unit * (pi / 2);
        c1 = -b2;
        c2 = b1 + s * b2;
        break;
    case Symmetry::R5:
        // B -> conj(B)^{-1}
        xi2 = std::conj(xi);
        s2 = std::conj(s);
        c1 = std::conj(b1 + s * b2);
        c2 = -std::conj(b2);
        break;
    case Symmetry::M1:
        xi2 = xi - I_unit * pi;
        c1 = b1 - s * (b2 + s * b1);
        c2 = b2 + s * b1;
        break;
    case Symmetry::M1_inv:
        xi2 = xi + I_unit * pi;
        c1 = b1 + s * b2;
        c2 = b2 - s * (b1 + s * b2);
        break;
    }
    MonodromyPoint q{s2, c1, c2, constraint_residual(s2, c1, c2)};
    return {xi2, q};
}

struct QuotientInvariants {
    cplx y1, y2, y3;
    double residual;
};

inline QuotientInvariants quotient_invariants(const MonodromyPoint& p) {
    QuotientInvariants q{p.s * p.s, p.b1 * p.b1, p.b2 * p.b2, 0};
    q.residual = std::abs(q.y1 * q.y2 * q.y3 - (q.y2 + q.y3 - 1.0) * (q.y2 + q.y3 - 1.0));
    return q;
}

enum class RealityClass { RealLine, UnitCircle, PositiveImaginary, None };

inline const char* to_string(RealityClass r) {
    switch (r) {
    case RealityClass::RealLine: return "RealLine";
    case RealityClass::UnitCircle: return "UnitCircle";
    case RealityClass::PositiveImaginary: return "PositiveImaginary";
    case RealityClass::None: return "None";
    }
    return "?";
}

inline std::vector<RealityClass> memberships(const MonodromyPoint& p, double tol = 1e-9) {
    std::vector<RealityClass> out;
    cplx b5 = p.b5();
    bool s_real = std::abs(p.s.imag()) <= tol;
    bool s_imag = std::abs(p.s.real()) <= tol;
    if (s_real && std::abs(b5.imag()) <= tol && std::abs(p.b2.real()) <= tol)
        out.push_back(RealityClass::RealLine);
    if (s_imag && std::abs(b5.imag()) <= tol && std::abs(p.b2.imag()) <= tol)
        out.push_back(RealityClass::UnitCircle);
    if (s_real && std::abs(p.s.real()) < 2.0 && std::abs(b5.real()) <= tol &&
        std::abs(p.b2.imag()) <= tol && p.b2.real() > 1.0)
        out.push_back(RealityClass::PositiveImaginary);
    return out;
}

inline RealityClass reality_class(const MonodromyPoint& p, double tol = 1e-9) {
    auto m = memberships(p, tol);
    return m.empty() ? RealityClass::None : m.front();
}

}  // namespace p3
