#include <doctest.h>

#include "common.hpp"
#include "painleve3/asymptotics.hpp"
#include "painleve3/extended.hpp"

using namespace p3;

TEST_CASE("case partition") {
    CHECK(asymptotic_case(0) == AsymptoticCase::A);
    CHECK(asymptotic_case(3) == AsymptoticCase::BPlus);
    CHECK(asymptotic_case(-3) == AsymptoticCase::BMinus);
    CHECK(asymptotic_case(2) == AsymptoticCase::CPlus);
    CHECK(asymptotic_case(-2) == AsymptoticCase::CMinus);
    CHECK(asymptotic_case(cplx(3, 1e-3)) == AsymptoticCase::A);
    CHECK(asymptotic_case(1.999) == AsymptoticCase::A);
}

TEST_CASE("kappa constants") {
    CHECK(kappa_constants(0).first == cplx(1.0));
    CHECK(std::abs(kappa_constants(0).second - (-4.0)) < 1e-13);
    CHECK(std::abs(kappa_constants(0.25).first - 2.958675119) < 1e-8);
    // s = 3: double Lanczos against the 50-digit Stirling evaluation
    cplx am = spectral(3).alpha_minus;
    cplx k = kappa_constants(am).first;
    hp::complex a(am.real(), am.imag());
    hp::complex half(0.5, 0);
    hp::complex kk = exp(hp::lgamma(half - a) - hp::lgamma(half + a));
    CHECK(std::abs(k - cplx(double(kk.real()), double(kk.imag()))) < 1e-12 * std::abs(k));
    CHECK_THROWS_AS(kappa_constants(0.5), Error);
}

TEST_CASE("leading term examples") {
    // B = I: two-term value 1 + kappa_{1,-1} (x/2)^2 with kappa_{1,-1} = -4
    CHECK(std::abs(leading_term(make_point(0, 1, 0), 0.5) - 0.75) < 1e-13);
    cplx v = leading_term(make_point(0, 0, 1), 0.3);
    CHECK(std::abs(v - cplx(0, 1)) < 0.3 * 0.3);
    CHECK(std::abs(leading_term(make_point(2, 1, 0), 0.1) - 0.483703) < 1e-6);
    CHECK(std::abs(leading_term(make_point(2, 1, 0), 0.1) + 0.2 * (std::log(0.05) + euler_gamma)) < 1e-14);
}

TEST_CASE("R2 and R5 equivariance of the two-term expansion") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 40; ++i) {
        cplx s = std::polar(1.8 * U(rng), 2 * pi * U(rng));
        cplx bm = std::polar(0.3 + 2.7 * U(rng), 2 * pi * U(rng));
        auto p = testing::from_s_bminus(s, bm);
        cplx x = std::polar(0.01 + 0.05 * U(rng), 2.5 * (U(rng) - 0.5));
        auto q2 = apply_symmetry(Symmetry::R2, 0, p).second;
        CHECK(leading_term(q2, x) == -leading_term(p, x));
        auto q5 = apply_symmetry(Symmetry::R5, 0, p).second;
        cplx a = std::conj(leading_term(p, std::conj(x)));
        cplx b = leading_term(q5, x);
        CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("sine form equals the two-term sum for s > 2") {
    for (double s : {2.5, 3.0, 4.0}) {
        for (double ph : {0.3, 1.7, 4.5}) {
            double w = std::sqrt(s * s / 4 - 1);
            auto p = from_real_form(s, std::cos(ph), std::sin(ph) / w, 1e-12);
            for (double x : {1e-3, 3e-3, 2e-2}) {
                cplx a = leading_term(p, x), b = sine_form(p, x);
                CHECK(std::abs(a - b) < 1e-12 * std::max(x, std::abs(a)));
            }
        }
    }
    CHECK_THROWS_AS(sine_form(make_point(0, 1, 0), 0.1), Error);
}

// residual of x d/dx g = 2x^2 (f^2 - f^-2) with g = x f'/(2f) taken from the two-term sum
static double expansion_residual(const Expansion& e, double x) {
    cplx f = 0, tf = 0, ttf = 0, L = std::log(x / 2);
    for (const auto& t : e.terms) {
        cplx pw = std::exp(t.exponent * L);
        f += t.coefficient * pw;
        tf += t.exponent * t.coefficient * pw;
        ttf += t.exponent * t.exponent * t.coefficient * pw;
    }
    return std::abs((f * ttf - tf * tf - 4 * x * x * (f * f * f * f - 1.0)) / (2.0 * f * f));
}

TEST_CASE("two-term expansion solves the equation to order x^(2 + 2 Re alpha)") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> U(0, 1);
    int tested = 0;
    while (tested < 20) {
        cplx s = std::polar(1.9 * U(rng), 2 * pi * U(rng));
        cplx am = spectral(s).alpha_minus;
        if (am.real() < 0) continue;  // the sum with Re alpha < 0 is the reciprocal-side form
        ++tested;
        auto p = testing::from_s_bminus(s, std::polar(0.3 + 2.7 * U(rng), 2 * pi * U(rng)));
        auto e = expansion(p);
        double q = 2 + 2 * am.real() - 1e-3;
        double lo = 1e300, hi = 0;
        for (double x = 1e-2; x >= 1e-5; x /= 3) {  // below 1e-5 the residual is at rounding level
            double r = expansion_residual(e, x) / std::pow(x, q);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        // bounded: the ratio does not grow as x decreases
        CHECK(expansion_residual(e, 1e-5) / std::pow(1e-5, q) <= 1.5 * expansion_residual(e, 1e-2) / std::pow(1e-2, q) + 1e-12);
        CHECK(hi < 1e6);
    }
}

TEST_CASE("ODE-completed series agrees with the two-term sum to the neglected order") {
    auto p = testing::from_s_bminus(cplx(0.7, 0.2), cplx(1.3, -0.4));
    auto sd = spectral(p.s);
    SeriesSolution ser(sd.alpha_minus, *eigen_data(p).b_minus, 8);
    for (double x : {1e-2, 1e-3}) {
        cplx a = ser.eval(x).first, b = leading_term(p, x);
        CHECK(std::abs(a - b) < 50 * std::pow(x, 2 + 2 * sd.alpha_minus.real()) * std::abs(b));
    }
    CHECK(std::abs(ser.coefficient(0, 1) - kappa_constants(sd.alpha_minus).first) < 1e-13);
}

TEST_CASE("seed_state") {
    auto st = seed_state(make_point(0, 1, 0), 1e-3);
    CHECK(st.k == 0);
    CHECK(std::abs(st.f - 1.0) < 1e-12);
    FG fg = to_fg(st);
    CHECK(std::abs(fg.g0) < 1e-12);
    CHECK(std::abs(st.gt - (2e-3 - 1)) < 1e-12);
    auto sm = seed_state(make_point(0, -1, 0), 1e-3);
    CHECK(std::abs(sm.f + 1.0) < 1e-12);
    CHECK(std::abs(to_fg(sm).g0) < 1e-12);
    CHECK_THROWS_AS(seed_state(make_point(0, 1, 0), 0.5), Error);
    auto p3 = from_real_form(3, 0, 1 / std::sqrt(1.25), 1e-12);
    try {
        seed_state(p3, 1e-6);
        FAIL("expected CaseUnsupported");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CaseUnsupported);
    }
    SeedOptions so;
    so.gap_safety = true;
    auto sg = seed_state(p3, 1e-6, so);
    CHECK(sg.x <= 1e-6 * 1.0001);
    CHECK(std::abs(sg.f) > 0);
    // reciprocal cases seed the reciprocal chart
    auto r = seed_state(from_real_form(-2, 1, 0.3, 1e-12), 1e-4);
    CHECK(r.k == 1);
}

TEST_CASE("predicted ladder") {
    auto p = from_real_form(3, 0, 1 / std::sqrt(1.25), 1e-12);
    auto ev = predict_small_x_events(p, 6);
    double t = *spectral(3).t_NI;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
        double ratio = std::abs(ev[i + 1].x) / std::abs(ev[i].x);
        CHECK(std::abs(ratio - std::exp(-pi / (2 * t))) < 1e-12);
        CHECK(std::abs(ratio - 5.93e-3) < 0.01e-3);
        CHECK(std::abs(ev[i].x.imag()) < 1e-12 * std::abs(ev[i].x));
        CHECK(is_zero(ev[i].kind));
        CHECK(ev[i].kind != ev[i + 1].kind);
    }
    for (const auto& e : ev) {
        double x = e.x.real();
        CHECK(std::abs(leading_term(p, x)) <= 1e-9 * x);
    }
    auto pm = apply_symmetry(Symmetry::R1, 0, p).second;
    auto evm = predict_small_x_events(pm, 6);
    for (std::size_t i = 0; i < ev.size(); ++i) {
        CHECK(std::abs(std::abs(evm[i].x) - std::abs(ev[i].x)) < 1e-12 * std::abs(ev[i].x));
        CHECK(!is_zero(evm[i].kind));
    }
    CHECK_THROWS_AS(predict_small_x_events(make_point(0, 1, 0), 3), Error);
}

TEST_CASE("Hankel frame constants") {
    auto t0 = formal_frame_coefficients(0, 6);
    CHECK(std::abs(t0.plus_closed[0] - 1.0) < 1e-14);
    CHECK(std::abs(t0.plus_closed[1] + 1.0) < 1e-14);
    CHECK(std::abs(t0.plus_recursive[1] + 1.0) < 1e-14);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> U(-0.45, 0.45);
    for (int i = 0; i < 10; ++i) {
        cplx a{U(rng), U(rng)};
        CHECK(formal_frame_coefficients(a, 6).max_discrepancy < 1e-12);
    }
}
