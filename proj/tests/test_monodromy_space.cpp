#include <doctest.h>

#include "common.hpp"

using namespace p3;
using testing::dist;

TEST_CASE("make_point validates the surface equation") {
    CHECK(make_point(0, 1, 0).residual == 0);
    CHECK(make_point(1, 0, 1).residual == 0);
    CHECK_THROWS_AS(make_point(2, -1, 1), Error);
    try {
        make_point(2, -1, 1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConstraintViolation);
        CHECK(e.exit_code() == 2);
    }
}

TEST_CASE("sqrt_branch values") {
    CHECK(std::abs(sqrt_branch(0) - cplx(0, 1)) < 1e-15);
    CHECK(sqrt_branch(2) == cplx(0));
    CHECK(sqrt_branch(-2) == cplx(0));
    CHECK(std::abs(sqrt_branch(3) - std::sqrt(1.25)) < 1e-15);
    CHECK(std::abs(sqrt_branch(3) - 1.118034) < 1e-6);
}

TEST_CASE("sqrt_branch: argument in [0, pi) and continuity inside each region") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(-4, 4);
    for (int i = 0; i < 500; ++i) {
        cplx s{U(rng), U(rng)};
        cplx w = sqrt_branch(s);
        CHECK(std::abs(w * w - (0.25 * s * s - 1.0)) < 1e-12 * (1 + std::norm(s)));
        double a = std::arg(w);
        CHECK(((a >= 0 && a < pi) || w == cplx(0)));
    }
    // path in the upper half plane and along (-2, 2)
    double step = 1e-3;
    cplx prev = sqrt_branch(cplx(-3.5, 0.5));
    for (double t = -3.5 + step; t <= 3.5; t += step) {
        cplx w = sqrt_branch(cplx(t, 0.5));
        CHECK(std::abs(w - prev) < 10 * step);
        prev = w;
    }
}

TEST_CASE("spectral examples") {
    auto d0 = spectral(0);
    CHECK(std::abs(d0.lambda_plus - 1.0) < 1e-15);
    CHECK(std::abs(d0.lambda_minus - 1.0) < 1e-15);
    CHECK(std::abs(d0.alpha_minus) < 1e-15);
    CHECK(std::abs(d0.v_plus[1] - cplx(0, -1)) < 1e-15);
    CHECK(std::abs(d0.v_minus[1] - cplx(0, 1)) < 1e-15);

    auto d2 = spectral(2);
    CHECK(d2.jordan_flag);
    CHECK(d2.alpha_plus == cplx(-0.5));
    CHECK(d2.alpha_minus == cplx(0.5));
    CHECK(d2.lambda_plus == cplx(-1.0));

    auto d3 = spectral(3);
    CHECK(std::abs(d3.lambda_minus - (-6.854101966249685)) < 1e-12);
    CHECK(std::abs(d3.lambda_plus - (-0.145898033750315)) < 1e-12);
    REQUIRE(d3.t_NI);
    CHECK(std::abs(*d3.t_NI - 0.306348962530) < 1e-9);  // log(6.854101966...) / 2pi
    CHECK(std::abs(d3.alpha_minus - cplx(0.5, *d3.t_NI)) < 1e-15);
}

TEST_CASE("spectral identities on random s") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int i = 0; i < 300; ++i) {
        cplx s{U(rng), i % 3 == 0 ? 0.0 : U(rng)};
        auto d = spectral(s);
        CHECK(std::abs(d.lambda_plus * d.lambda_minus - 1.0) < 1e-10 * std::max(1.0, std::abs(d.lambda_minus)));
        CHECK(std::abs(d.alpha_plus + d.alpha_minus) < 1e-12);
        if (!d.jordan_flag) {
            CHECK(std::abs(std::exp(-2.0 * pi * I_unit * d.alpha_minus) - d.lambda_minus) <
                  1e-10 * std::max(1.0, std::abs(d.lambda_minus)));
            CHECK(std::abs(d.alpha_minus.real()) <= 0.5 + 1e-12);
        }
    }
}

TEST_CASE("eigen_data examples and invariants") {
    auto e0 = eigen_data(make_point(0, 1, 0));
    CHECK(std::abs(*e0.b_plus - 1.0) < 1e-15);
    CHECK(std::abs(*e0.delta_NI) < 1e-15);

    auto e1 = eigen_data(make_point(0, 0, 1));
    CHECK(std::abs(*e1.b_minus - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(*e1.b_plus - cplx(0, -1)) < 1e-15);

    auto p3pt = make_point(3, cplx(0, 1.5 / std::sqrt(1.25)), cplx(0, -1 / std::sqrt(1.25)));
    auto e3 = eigen_data(p3pt);
    CHECK(std::abs(*e3.b_minus - cplx(0, -1)) < 1e-12);
    CHECK(std::abs(*e3.delta_NI - 1.5 * pi) < 1e-12);

    std::mt19937 rng(3);
    for (int i = 0; i < 200; ++i) {
        auto p = testing::random_point(rng);
        auto sd = spectral(p.s);
        if (sd.jordan_flag) continue;
        auto e = eigen_data(p);
        CHECK(std::abs(*e.b_plus * *e.b_minus - 1.0) < 1e-10);
        Mat2 B = p.B();
        for (auto [v, b] : {std::pair{sd.v_plus, *e.b_plus}, std::pair{sd.v_minus, *e.b_minus}}) {
            cplx r0 = B.a * v[0] + B.b * v[1] - b * v[0];
            cplx r1 = B.c * v[0] + B.d * v[1] - b * v[1];
            CHECK(std::max(std::abs(r0), std::abs(r1)) < 1e-10 * (1 + B.max_abs()));
        }
    }
}

TEST_CASE("structure matrices") {
    auto [M0, T0] = structure_matrices(0);
    CHECK((M0 - Mat2::identity()).max_abs() == 0);
    CHECK((T0 - Mat2{0, 1, -1, 0}).max_abs() == 0);
    auto [M1, T1] = structure_matrices(1);
    CHECK((M1 - Mat2{1, -1, 1, 0}).max_abs() == 0);
    CHECK((T1 * T1 - Mat2{-1, 1, -1, 0}).max_abs() == 0);
    CHECK((stokes_S(1).transpose() * stokes_S(1).inverse() - M1).max_abs() < 1e-15);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int i = 0; i < 200; ++i) {
        cplx s{U(rng), U(rng)};
        auto [M, T] = structure_matrices(s);
        CHECK((T * T + M).max_abs() < 1e-12 * (1 + std::norm(s)));
    }
}

TEST_CASE("B commutes with Mon0") {
    std::mt19937 rng(5);
    for (int i = 0; i < 100; ++i) {
        auto p = testing::random_point(rng);
        Mat2 M = mon0(p.s), B = p.B();
        CHECK((B * M - M * B).max_abs() < 1e-10 * (1 + M.max_abs() * B.max_abs()));
    }
}

TEST_CASE("symmetry examples") {
    cplx xi{0.3, -0.2};
    auto id = make_point(0, 1, 0);
    auto [x1, q1] = apply_symmetry(Symmetry::R1, xi, id);
    CHECK(x1 == xi);
    CHECK(dist(q1, id) == 0);
    auto [x2, q2] = apply_symmetry(Symmetry::M1, xi, id);
    CHECK(std::abs(x2 - (xi - I_unit * pi)) < 1e-15);
    CHECK(dist(q2, id) == 0);
    auto [x3, q3] = apply_symmetry(Symmetry::R4, xi, id);
    CHECK(std::abs(x3 - (xi + I_unit * pi / 2.0)) < 1e-15);
    CHECK((q3.B() - Mat2{0, 1, -1, 0}).max_abs() == 0);
}

TEST_CASE("symmetry laws on random points") {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> U(-1, 1);
    auto compose = [](Symmetry a, Symmetry b, cplx xi, const MonodromyPoint& p) {
        auto [x1, q1] = apply_symmetry(a, xi, p);
        return apply_symmetry(b, x1, q1);
    };
    for (int i = 0; i < 50; ++i) {
        auto p = testing::random_point(rng);
        cplx xi{U(rng), U(rng)};
        for (Symmetry s : {Symmetry::R1, Symmetry::R2, Symmetry::R3, Symmetry::R4, Symmetry::R5, Symmetry::M1,
                           Symmetry::M1_inv}) {
            auto [x, q] = apply_symmetry(s, xi, p);
            CHECK(q.residual < 1e-12 * std::max(1.0, std::norm(p.s) * std::norm(p.b2) + std::norm(p.b1)));
        }
        double scale = 1 + std::abs(p.s) * std::abs(p.b2);
        auto r55 = compose(Symmetry::R5, Symmetry::R5, xi, p);
        CHECK(r55.first == xi);
        CHECK(dist(r55.second, p) <= 4e-16 * scale);
        auto r44 = compose(Symmetry::R4, Symmetry::R4, xi, p);
        auto r2m = compose(Symmetry::M1_inv, Symmetry::R2, xi, p);
        CHECK(std::abs(r44.first - r2m.first) == 0);
        CHECK(dist(r44.second, r2m.second) == 0);
        auto r12 = compose(Symmetry::R2, Symmetry::R1, xi, p);
        auto r3 = apply_symmetry(Symmetry::R3, xi, p);
        CHECK(dist(r12.second, r3.second) == 0);
        auto mm = compose(Symmetry::M1, Symmetry::M1_inv, xi, p);
        CHECK(dist(mm.second, p) < 1e-12 * (1 + std::norm(p.s)) * (1 + std::abs(p.b1) + std::abs(p.b2)));
    }
}

TEST_CASE("quotient invariants") {
    auto q = quotient_invariants(make_point(0, 1, 0));
    CHECK(q.y1 == cplx(0));
    CHECK(q.y2 == cplx(1));
    CHECK(q.residual == 0);
    auto p = make_point(1, 0, 1);
    auto q0 = quotient_invariants(p);
    CHECK(q0.residual == 0);
    for (Symmetry s : {Symmetry::R1, Symmetry::R2, Symmetry::R3}) {
        auto qs = quotient_invariants(apply_symmetry(s, 0, p).second);
        CHECK(qs.y1 == q0.y1);
        CHECK(qs.y2 == q0.y2);
        CHECK(qs.y3 == q0.y3);
    }
    std::mt19937 rng(7);
    for (int i = 0; i < 100; ++i) {
        auto r = testing::random_point(rng);
        auto qr = quotient_invariants(r);
        CHECK(qr.residual < 1e-10 * (1 + std::norm(qr.y1) * std::norm(qr.y2) * std::norm(qr.y3)));
    }
}

TEST_CASE("reality classes") {
    CHECK(reality_class(make_point(0, 1, 0)) == RealityClass::RealLine);
    auto both = memberships(make_point(0, 1, 0));
    CHECK(std::find(both.begin(), both.end(), RealityClass::UnitCircle) != both.end());
    CHECK(reality_class(make_point(cplx(0, 1), cplx(0, -1 / std::sqrt(5.0)), 2 / std::sqrt(5.0), 1e-12)) ==
          RealityClass::UnitCircle);
    CHECK(reality_class(make_point(0, cplx(0, std::sqrt(3.0)), 2, 1e-12)) == RealityClass::PositiveImaginary);
    CHECK(reality_class(make_point(cplx(1, 1), 1, 0)) == RealityClass::None);
}
