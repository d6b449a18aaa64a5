#pragma once

#include <random>

#include "painleve3/monodromy_space.hpp"

namespace testing {

using p3::cplx;

// random point on the surface: pick s, b1 and solve the quadratic for b2
inline p3::MonodromyPoint random_point(std::mt19937& rng, double smax = 3.0) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    cplx s{smax * U(rng), smax * U(rng)};
    cplx b1{1.5 * U(rng), 1.5 * U(rng)};
    cplx disc = std::sqrt(s * s * b1 * b1 - 4.0 * (b1 * b1 - 1.0));
    cplx b2 = 0.5 * (-s * b1 + (U(rng) > 0 ? disc : -disc));
    return p3::make_point(s, b1, b2, 1e-9);
}

// point with given s and b_minus (case A branch)
inline p3::MonodromyPoint from_s_bminus(cplx s, cplx bm) {
    cplx w = p3::sqrt_branch(s);
    cplx bp = 1.0 / bm;
    cplx b5 = 0.5 * (bm + bp), b2 = (bm - bp) / (2.0 * w);
    return p3::make_point(s, b5 - 0.5 * s * b2, b2, 1e-9);
}

// real point with given s and b5; b6 from the surface equation
inline p3::MonodromyPoint real_point(double s, double b5, int sign) {
    double w = 1 - s * s / 4;
    double b6 = sign * std::sqrt(std::max(0.0, (b5 * b5 - 1) / w));
    if (w < 0) b6 = sign * std::sqrt(std::max(0.0, (1 - b5 * b5) / -w));
    return p3::from_real_form(s, b5, b6, 1e-9);
}

inline double dist(const p3::MonodromyPoint& a, const p3::MonodromyPoint& b) {
    return std::max({std::abs(a.s - b.s), std::abs(a.b1 - b.b1), std::abs(a.b2 - b.b2)});
}

}  // namespace testing
