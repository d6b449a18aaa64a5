#pragma once

#include <optional>
#include <vector>

#include "chart.hpp"
#include "monodromy_space.hpp"

namespace p3 {

enum class AsymptoticCase { A, BPlus, BMinus, CPlus, CMinus };

inline const char* to_string(AsymptoticCase c) {
    switch (c) {
    case AsymptoticCase::A: return "A";
    case AsymptoticCase::BPlus: return "BPlus";
    case AsymptoticCase::BMinus: return "BMinus";
    case AsymptoticCase::CPlus: return "CPlus";
    case AsymptoticCase::CMinus: return "CMinus";
    }
    return "?";
}

inline AsymptoticCase asymptotic_case(cplx s, double tol = 1e-12) {
    if (std::abs(s.imag()) > tol) return AsymptoticCase::A;
    double r = s.real();
    if (std::abs(r - 2.0) <= tol) return AsymptoticCase::CPlus;
    if (std::abs(r + 2.0) <= tol) return AsymptoticCase::CMinus;
    if (r > 2.0) return AsymptoticCase::BPlus;
    if (r < -2.0) return AsymptoticCase::BMinus;
    return AsymptoticCase::A;
}

inline bool reciprocal_case(AsymptoticCase c) {
    return c == AsymptoticCase::BMinus || c == AsymptoticCase::CMinus;
}

inline std::pair<cplx, cplx> kappa_constants(cplx alpha_minus) {
    cplx ap1 = -alpha_minus + 1.0;
    return {gamma_c(0.5 - alpha_minus) / gamma_c(0.5 + alpha_minus),
            gamma_c(0.5 - ap1) / gamma_c(0.5 + ap1)};
}

struct ExpansionTerm {
    cplx coefficient;
    cplx exponent;  // power of x/2
    int log_power;  // power of log(x/2)
};

struct Expansion {
    AsymptoticCase kase;
    std::vector<ExpansionTerm> terms;
    double valid_radius_hint;
    bool reciprocal = false;  // terms describe 1/f (R1 image)
};

inline double default_radius(cplx alpha_minus) {
    return std::min(0.1, 0.1 * std::exp(-std::abs(alpha_minus.imag())));
}

// log(x/2) on the distinguished branch, arg x in (-pi, pi).
inline cplx log_half(cplx x) { return std::log(0.5 * x); }

inline Expansion expansion(const MonodromyPoint& p0) {
    AsymptoticCase c = asymptotic_case(p0.s);
    MonodromyPoint p = p0;
    Expansion e;
    e.kase = c;
    if (reciprocal_case(c)) {
        p = apply_symmetry(Symmetry::R1, 0.0, p0).second;
        e.reciprocal = true;
    }
    SpectralData sd = spectral(p.s);
    e.valid_radius_hint = default_radius(sd.alpha_minus);
    if (c == AsymptoticCase::CPlus || c == AsymptoticCase::CMinus) {
        cplx bt = p.b5();
        cplx k = -I_unit * (pi / 2) * bt * p.b2 + euler_gamma;
        e.terms.push_back({-4.0 * bt, 1.0, 1});
        e.terms.push_back({-4.0 * bt * k, 1.0, 0});
        return e;
    }
    EigenData ed = eigen_data(p);
    cplx bm = *ed.b_minus;
    auto [k01, k1m1] = kappa_constants(sd.alpha_minus);
    e.terms.push_back({k01 * bm, 2.0 * sd.alpha_minus, 0});
    e.terms.push_back({k1m1 / bm, 2.0 - 2.0 * sd.alpha_minus, 0});
    return e;
}

// Value and x d/dx of the expansion sum (of 1/f in the reciprocal cases).
inline std::pair<cplx, cplx> evaluate_terms(const Expansion& e, cplx x) {
    cplx L = log_half(x);
    cplx v = 0, dv = 0;
    for (const auto& t : e.terms) {
        cplx pw = std::exp(t.exponent * L);
        cplx lp = t.log_power == 0 ? cplx(1.0) : L;
        v += t.coefficient * pw * lp;
        dv += t.coefficient * pw * (t.exponent * lp + (t.log_power == 1 ? cplx(1.0) : cplx(0.0)));
    }
    return {v, dv};
}

inline cplx leading_term(const MonodromyPoint& p, cplx x) {
    Expansion e = expansion(p);
    cplx v = evaluate_terms(e, x).first;
    return e.reciprocal ? 1.0 / v : v;
}

// Case-B sine form -(x/t) sin(2 t log(x/2) - 2 argGamma(1+it) + delta).
inline cplx sine_form(const MonodromyPoint& p, cplx x) {
    if (asymptotic_case(p.s) != AsymptoticCase::BPlus)
        throw Error(ErrorKind::WrongCase, "sine form needs s real > 2");
    SpectralData sd = spectral(p.s);
    double t = *sd.t_NI;
    cplx d = *eigen_data(p).delta_NI;
    return -(x / t) * std::sin(2.0 * t * log_half(x) - 2.0 * arg_gamma_1pit(t) + d);
}

// Completion of the two-term expansion by the ODE itself: f = sum c[m][n] X^m bt^n with
// X = (x/2)^2, bt = (x/2)^eps b_-, eps = 2 alpha_-, solved order by order from
// f th^2 f - (th f)^2 = 16 X (f^4 - 1), th = x d/dx. C is any complex scalar type.
template <class C>
class BasicSeries {
public:
    BasicSeries(C eps, C b_minus, C kappa01, int order)
        : M_(order), eps_(eps), bm_(b_minus), K_(kappa01) {
        lo_ = -2 * M_ - 2;
        hi_ = 4 * M_ + 6;
        width_ = hi_ - lo_ + 1;
        c_.assign(M_ + 1, Poly(width_, C(0.0)));
        c_[0][idx(1)] = K_;
        solve();
    }

    int order() const { return M_; }
    C coefficient(int m, int n) const {
        if (m < 0 || m > M_ || n < lo_ || n > hi_) return C(0.0);
        return c_[m][idx(n)];
    }

    // f and x f'(x); levels (if given) receives the modulus of each X^m block
    std::pair<C, C> eval(const C& x, std::vector<double>* levels = nullptr) const {
        using std::exp;
        using std::log;
        C L = log(x * 0.5);
        C X = exp(L * 2.0);
        C bt = exp(eps_ * L) * bm_;
        C f(0.0), df(0.0), Xm(1.0);
        if (levels) levels->assign(M_ + 1, 0.0);
        for (int m = 0; m <= M_; ++m) {
            C fm(0.0);
            for (int n = lo_; n <= hi_; ++n) {
                const C& c = c_[m][idx(n)];
                if (c == C(0.0)) continue;
                C term = c * Xm * ipow(bt, n);
                fm += term;
                df += (eps_ * double(n) + 2.0 * m) * term;
            }
            f += fm;
            if (levels) {
                using std::abs;
                (*levels)[m] = static_cast<double>(abs(fm));
            }
            Xm *= X;
        }
        return {f, df};
    }

private:
    using Poly = std::vector<C>;
    int M_;
    C eps_, bm_, K_;
    int lo_, hi_, width_;
    std::vector<Poly> c_;

    int idx(int n) const { return n - lo_; }

    static C ipow(const C& z, int n) {
        C r(1.0), b = n >= 0 ? z : C(1.0) / z;
        for (int k = std::abs(n); k > 0; k >>= 1) {
            if (k & 1) r *= b;
            b *= b;
        }
        return r;
    }

    Poly mul(const Poly& a, const Poly& b) const {
        Poly r(width_, C(0.0));
        for (int i = 0; i < width_; ++i) {
            if (a[i] == C(0.0)) continue;
            for (int j = 0; j < width_; ++j) {
                if (b[j] == C(0.0)) continue;
                int n = (i + lo_) + (j + lo_);
                if (n < lo_ || n > hi_) continue;
                r[idx(n)] += a[i] * b[j];
            }
        }
        return r;
    }

    Poly theta(const Poly& a, int m, int power) const {
        Poly r = a;
        for (int i = 0; i < width_; ++i) {
            if (r[i] == C(0.0)) continue;
            C mu = eps_ * double(i + lo_) + 2.0 * m;
            for (int k = 0; k < power; ++k) r[i] *= mu;
        }
        return r;
    }

    void solve() {
        std::vector<Poly> f2(M_ + 1, Poly(width_, C(0.0)));
        for (int m = 1; m <= M_; ++m) {
            int l = m - 1;
            Poly s(width_, C(0.0));
            for (int a = 0; a <= l; ++a) {
                Poly pr = mul(c_[a], c_[l - a]);
                for (int i = 0; i < width_; ++i) s[i] += pr[i];
            }
            f2[l] = s;
            Poly f4(width_, C(0.0));
            for (int a = 0; a <= l; ++a) {
                Poly pr = mul(f2[a], f2[l - a]);
                for (int i = 0; i < width_; ++i) f4[i] += pr[i];
            }
            Poly rhs(width_, C(0.0));
            for (int i = 0; i < width_; ++i) rhs[i] = f4[i] * 16.0;
            if (m == 1) rhs[idx(0)] -= 16.0;
            for (int k = 1; k <= m - 1; ++k) {
                Poly t1 = mul(c_[k], theta(c_[m - k], m - k, 2));
                Poly t2 = mul(theta(c_[k], k, 1), theta(c_[m - k], m - k, 1));
                for (int i = 0; i < width_; ++i) rhs[i] -= t1[i] - t2[i];
            }
            for (int i = 0; i < width_; ++i) {
                if (rhs[i] == C(0.0)) continue;
                int n = i + lo_ - 1;
                if (n < lo_) continue;
                C den = eps_ * double(n - 1) + 2.0 * m;
                c_[m][idx(n)] = rhs[i] / (K_ * den * den);
            }
        }
    }
};

class SeriesSolution : public BasicSeries<cplx> {
public:
    SeriesSolution(cplx alpha_minus, cplx b_minus, int order)
        : BasicSeries<cplx>(2.0 * alpha_minus, b_minus, kappa_constants(alpha_minus).first, order) {}
};


struct PredictedEvent {
    int k;
    cplx x;
    EventKind kind;
};

// Geometric ladder of zeros (s > 2) or poles (s < -2) near 0.
inline cplx ladder_point(double t, cplx delta, int k) {
    return 2.0 * std::exp((2.0 * arg_gamma_1pit(t) - delta) / (2.0 * t)) * std::exp(-k * pi / (2.0 * t));
}

inline std::vector<PredictedEvent> predict_small_x_events(const MonodromyPoint& p, int count,
                                                           std::optional<double> below = std::nullopt) {
    AsymptoticCase c = asymptotic_case(p.s);
    if (c != AsymptoticCase::BPlus && c != AsymptoticCase::BMinus)
        throw Error(ErrorKind::WrongCase, "event ladder needs real s with |s| > 2");
    bool poles = c == AsymptoticCase::BMinus;
    MonodromyPoint q = poles ? apply_symmetry(Symmetry::R1, 0.0, p).second : p;
    double t = *spectral(q.s).t_NI;
    cplx d = *eigen_data(q).delta_NI;
    double lim = below ? *below : default_radius(spectral(q.s).alpha_minus);
    // first k with |x_k| <= lim
    double lx0 = std::log(std::abs(ladder_point(t, d, 0)));
    int k0 = int(std::ceil((lx0 - std::log(lim)) * 2.0 * t / pi));
    std::vector<PredictedEvent> out;
    for (int j = 0; j < count; ++j) {
        int k = k0 + j;
        bool even = (k % 2) == 0;
        EventKind kind = even ? EventKind::ZeroMinus : EventKind::ZeroPlus;
        if (poles) kind = even ? EventKind::PoleMinus : EventKind::PolePlus;
        out.push_back({k, ladder_point(t, d, k), kind});
    }
    return out;
}

struct SeedOptions {
    int series_order = 6;
    std::optional<double> radius;  // overrides the default hint
    bool gap_safety = false;
    double truncation_tol = 1e-15;  // last series block relative to |f|
};

// Geometric midpoint of the pair of predicted ladder points bracketing x.
inline double gap_midpoint(const MonodromyPoint& p, double x) {
    AsymptoticCase c = asymptotic_case(p.s);
    MonodromyPoint q = c == AsymptoticCase::BMinus ? apply_symmetry(Symmetry::R1, 0.0, p).second : p;
    double t = *spectral(q.s).t_NI;
    cplx d = *eigen_data(q).delta_NI;
    double lx0 = std::log(std::abs(ladder_point(t, d, 0)));
    double kk = std::floor((lx0 - std::log(x)) * 2.0 * t / pi);
    return std::abs(ladder_point(t, d, 0)) * std::exp(-(kk + 0.5) * pi / (2.0 * t));
}

inline ChartState seed_state(const MonodromyPoint& p, double x_small, const SeedOptions& opt = {}) {
    if (!(x_small > 0)) throw Error(ErrorKind::SeedOutsideValidity, "x_small must be positive");
    AsymptoticCase c = asymptotic_case(p.s);
    bool recip = reciprocal_case(c);
    MonodromyPoint q = recip ? apply_symmetry(Symmetry::R1, 0.0, p).second : p;
    SpectralData sd = spectral(q.s);
    double radius = opt.radius ? *opt.radius : default_radius(sd.alpha_minus);
    if (c == AsymptoticCase::BPlus || c == AsymptoticCase::BMinus) {
        if (!opt.gap_safety)
            throw Error(ErrorKind::CaseUnsupported,
                        "zeros/poles accumulate at 0 for |s| > 2; enable gap safety");
        x_small = gap_midpoint(p, x_small);
        while (x_small > radius) x_small *= std::exp(-pi / (2.0 * *sd.t_NI));
    }
    if (x_small > radius)
        throw Error(ErrorKind::SeedOutsideValidity,
                    "x_small " + std::to_string(x_small) + " exceeds radius hint " + std::to_string(radius));
    cplx f, xf;
    if (c == AsymptoticCase::CPlus || c == AsymptoticCase::CMinus) {
        Expansion e = expansion(p);
        auto v = evaluate_terms(e, x_small);
        f = v.first;
        xf = v.second;
    } else {
        SeriesSolution ser(sd.alpha_minus, *eigen_data(q).b_minus, opt.series_order);
        // move toward 0 until the last block is negligible; for Re alpha_- near -1/2 the blocks
        // shrink only like x^(2 + 4 Re alpha_-)
        double shrink = (c == AsymptoticCase::A) ? 0.5 : std::exp(-pi / (2.0 * *sd.t_NI));
        std::vector<double> lv;
        auto v = ser.eval(x_small, &lv);
        for (int it = 0; it < 400 && lv.back() > opt.truncation_tol * std::abs(v.first) && x_small > 1e-250; ++it) {
            x_small *= shrink;
            v = ser.eval(x_small, &lv);
        }
        f = v.first;
        xf = v.second;
    }
    // (f, g) of the solution for q; for reciprocal cases this is (f_1, g_1) of p
    cplx g = xf / (2.0 * f);
    int k = recip ? 1 : 0;
    return {x_small, k, f, gt_from_g(x_small, f, g)};
}

struct FrameCoefficientTable {
    // entry j: closed and recursive values of a^+_{-j, .}(1) (component 1 for even j, 2 for odd j)
    std::vector<cplx> plus_closed, plus_recursive, minus_closed, minus_recursive;
    double max_discrepancy = 0;
};

// a^+_{-2k,1}, a^+_{-2k-1,2} at x = 1 (same formula with alpha_- for the minus family).
inline cplx frame_coefficient_closed(cplx alpha, int j) {
    int k = j / 2;
    double fact = std::tgamma(double(k) + 1.0);
    double sg = (k % 2 == 0) ? 1.0 : -1.0;
    if (j % 2 == 0)
        return gamma_c(alpha - 0.5 * (2.0 * k - 1.0)) * std::pow(cplx(2.0), alpha - 2.0 * k) * sg /
               (std::sqrt(pi) * fact);
    return gamma_c(alpha - 0.5 * (2.0 * k + 1.0)) * std::pow(cplx(2.0), alpha - 2.0 * k - 1.0) * sg /
           (std::sqrt(pi) * fact);
}

inline std::vector<cplx> frame_coefficients_recursive(cplx alpha, int jmax) {
    std::vector<cplx> a(jmax + 1);
    a[0] = gamma_c(alpha + 0.5) * std::pow(cplx(2.0), alpha) / std::sqrt(pi);
    for (int j = 1; j <= jmax; ++j) {
        int k = -j;  // coefficient index of a_{k}
        if (j % 2 == 1) {
            // (2 alpha + k) a_{k,2} = a_{k+1,1}
            a[j] = a[j - 1] / (2.0 * alpha + double(k));
        } else {
            // k a_{k,1} = a_{k+1,2}
            a[j] = a[j - 1] / double(k);
        }
    }
    return a;
}

inline FrameCoefficientTable formal_frame_coefficients(cplx alpha_plus, int k_max) {
    FrameCoefficientTable t;
    int jmax = 2 * k_max + 1;
    cplx alpha_minus = -alpha_plus;
    t.plus_recursive = frame_coefficients_recursive(alpha_plus, jmax);
    t.minus_recursive = frame_coefficients_recursive(alpha_minus, jmax);
    for (int j = 0; j <= jmax; ++j) {
        t.plus_closed.push_back(frame_coefficient_closed(alpha_plus, j));
        t.minus_closed.push_back(frame_coefficient_closed(alpha_minus, j));
        double sc = std::max(1.0, std::abs(t.plus_closed[j]));
        t.max_discrepancy = std::max(t.max_discrepancy, std::abs(t.plus_closed[j] - t.plus_recursive[j]) / sc);
        sc = std::max(1.0, std::abs(t.minus_closed[j]));
        t.max_discrepancy =
            std::max(t.max_discrepancy, std::abs(t.minus_closed[j] - t.minus_recursive[j]) / sc);
    }
    return t;
}

}  // namespace p3
