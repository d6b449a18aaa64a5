#pragma once

#include "direct_monodromy.hpp"
#include "extended.hpp"

namespace p3 {

enum class Precision { Auto, Double, Extended };

struct TrajectoryOptions {
    Precision precision = Precision::Auto;
    bool gap_safety = true;
    FlowOptions flow{};
    SeedOptions seed{};
    hp::Options extended{};
};

inline bool is_plus_minus_identity(const MonodromyPoint& p, double tol = 1e-9) {
    return std::abs(p.b2) <= tol && (std::abs(p.b1 - 1.0) <= tol || std::abs(p.b1 + 1.0) <= tol);
}

// Extended precision is chosen automatically for the real B = +-I solutions, which are unstable
// in the direction of increasing x.
inline bool wants_extended(const MonodromyPoint& p, Precision pr) {
    if (pr == Precision::Extended) return true;
    if (pr == Precision::Double) return false;
    return reality_class(p) == RealityClass::RealLine && is_plus_minus_identity(p);
}

// Seed near x0 (at or below it) and flow to x1. The trajectory starts at the actual seed point.
inline Trajectory trajectory(const MonodromyPoint& p, double x0, double x1, const TrajectoryOptions& o = {}) {
    if (!(x0 > 0) || !(x1 > 0)) throw Error(ErrorKind::Usage, "x0 and x1 must be positive");
    if (wants_extended(p, o.precision)) {
        auto sd = hp::seed(p, x0, o.gap_safety);
        return hp::flow(sd.state, x1, o.extended);
    }
    SeedOptions so = o.seed;
    so.gap_safety = so.gap_safety || o.gap_safety;
    AsymptoticCase c = asymptotic_case(p.s);
    MonodromyPoint q = reciprocal_case(c) ? apply_symmetry(Symmetry::R1, 0.0, p).second : p;
    double radius = so.radius ? *so.radius : default_radius(spectral(q.s).alpha_minus);
    ChartState st = seed_state(p, std::min(x0, radius), so);
    return flow(st, x1, o.flow);
}

struct RoundTripResult {
    double s_err = 0;
    double B_err = 0;
    StokesOutput recovered;
    double x_seed = 0;  // actual seed point
    int events = 0;
};

// seed, flow to x_probe, read the monodromy back
inline RoundTripResult round_trip(const MonodromyPoint& p, double x_seed, double x_probe,
                                  const TrajectoryOptions& to = {}, const StokesOptions& so = {}) {
    Trajectory tr = trajectory(p, x_seed, x_probe, to);
    RoundTripResult r;
    r.x_seed = tr.samples.front().x;
    r.events = int(tr.events.size());
    r.recovered = stokes_data(tr.final_state(), so);
    r.s_err = std::abs(r.recovered.s - p.s);
    r.B_err = (r.recovered.B.B() - p.B()).max_abs();
    return r;
}

}  // namespace p3
