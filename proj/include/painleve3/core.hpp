#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace p3 {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;
inline const cplx I_unit{0.0, 1.0};

enum class ErrorKind {
    ConstraintViolation,
    GammaPole,
    SeedOutsideValidity,
    CaseUnsupported,
    WrongCase,
    OnSingularLocus,
    StepFailure,
    NonFiniteState,
    AsymptoticMismatch,
    FrameDegenerate,
    TransportOverflow,
    NotRealFamily,
    FamilyMismatch,
    EventNotFound,
    InsufficientSpan,
    Usage,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::GammaPole: return "GammaPole";
    case ErrorKind::SeedOutsideValidity: return "SeedOutsideValidity";
    case ErrorKind::CaseUnsupported: return "CaseUnsupported";
    case ErrorKind::WrongCase: return "WrongCase";
    case ErrorKind::OnSingularLocus: return "OnSingularLocus";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::AsymptoticMismatch: return "AsymptoticMismatch";
    case ErrorKind::FrameDegenerate: return "FrameDegenerate";
    case ErrorKind::TransportOverflow: return "TransportOverflow";
    case ErrorKind::NotRealFamily: return "NotRealFamily";
    case ErrorKind::FamilyMismatch: return "FamilyMismatch";
    case ErrorKind::EventNotFound: return "EventNotFound";
    case ErrorKind::InsufficientSpan: return "InsufficientSpan";
    case ErrorKind::Usage: return "Usage";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& msg)
        : std::runtime_error(std::string(to_string(k)) + ": " + msg), kind_(k) {}
    ErrorKind kind() const { return kind_; }
    // 2 = validation, 3 = numerical
    int exit_code() const {
        switch (kind_) {
        case ErrorKind::GammaPole:
        case ErrorKind::StepFailure:
        case ErrorKind::NonFiniteState:
        case ErrorKind::AsymptoticMismatch:
        case ErrorKind::FrameDegenerate:
        case ErrorKind::TransportOverflow:
        case ErrorKind::EventNotFound:
            return 3;
        default:
            return 2;
        }
    }

private:
    ErrorKind kind_;
};

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// 2x2 complex matrix, row major.
struct Mat2 {
    cplx a{}, b{}, c{}, d{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(cplx p, cplx q) { return {p, 0.0, 0.0, q}; }

    cplx det() const { return a * d - b * c; }
    cplx trace() const { return a + d; }
    Mat2 inverse() const {
        cplx D = det();
        return {d / D, -b / D, -c / D, a / D};
    }
    Mat2 transpose() const { return {a, c, b, d}; }
    Mat2 conj() const { return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)}; }
    double max_abs() const {
        return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    }
    cplx operator()(int i, int j) const {
        return i == 0 ? (j == 0 ? a : b) : (j == 0 ? c : d);
    }
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
inline Mat2 operator+(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
inline Mat2 operator-(const Mat2& x, const Mat2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }
inline Mat2 operator*(cplx k, const Mat2& x) { return {k * x.a, k * x.b, k * x.c, k * x.d}; }
inline Mat2 operator*(const Mat2& x, cplx k) { return k * x; }
inline Mat2 operator-(const Mat2& x) { return {-x.a, -x.b, -x.c, -x.d}; }

using Row2 = std::array<cplx, 2>;

inline Row2 operator*(const Row2& r, const Mat2& m) {
    return {r[0] * m.a + r[1] * m.c, r[0] * m.b + r[1] * m.d};
}

inline Mat2 from_rows(const Row2& r1, const Row2& r2) { return {r1[0], r1[1], r2[0], r2[1]}; }

// Lanczos, g = 7, n = 9.
inline cplx lgamma_c(cplx z) {
    static const double g = 7.0;
    static const double coef[9] = {
        0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // reflection; log sin branch is irrelevant for exp() users
        return std::log(pi) - std::log(std::sin(pi * z)) - lgamma_c(1.0 - z);
    }
    z -= 1.0;
    cplx x = coef[0];
    for (int i = 1; i < 9; ++i) x += coef[i] / (z + double(i));
    cplx t = z + g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

inline bool near_gamma_pole(cplx z, double tol = 1e-12) {
    if (std::abs(z.imag()) > tol) return false;
    double r = z.real();
    if (r > 0.5) return false;
    return std::abs(r - std::round(r)) < tol;
}

inline cplx gamma_c(cplx z) {
    if (near_gamma_pole(z)) throw Error(ErrorKind::GammaPole, "Gamma argument at a pole");
    if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_c(1.0 - z));
    return std::exp(lgamma_c(z));
}

// Continuous branch of arg Gamma(1 + i t).
inline double arg_gamma_1pit(double t) { return lgamma_c(cplx(1.0, t)).imag(); }

// Principal branch of arg mapped into [0, 2pi).
inline double arg_0_2pi(cplx z) {
    double a = std::arg(z);
    if (a < 0) a += 2 * pi;
    if (a >= 2 * pi) a -= 2 * pi;
    return a;
}

}  // namespace p3
