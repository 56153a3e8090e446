#pragma once

#include <cmath>
#include <stdexcept>

#include "glosa/types.hpp"

namespace glosa {

/// Minimum-energy double-integrator arc between two boundary states over a
/// fixed horizon. The optimal acceleration is linear in time,
/// a(t) = c1 + c2*t, which makes the position a cubic polynomial.
struct CubicSegment {
    double x0 = 0.0, v0 = 0.0;   // state at local time 0
    double c1 = 0.0, c2 = 0.0;   // a(t) = c1 + c2 t
    double duration = 0.0;

    static CubicSegment between(VehicleState from, VehicleState to, double te) {
        if (te <= 0.0) throw std::invalid_argument("CubicSegment: horizon must be > 0");
        const double d = (to.x - from.x) - from.v * te;
        const double dv = to.v - from.v;
        CubicSegment s;
        s.x0 = from.x;
        s.v0 = from.v;
        s.c1 = 6.0 * d / (te * te) - 2.0 * dv / te;
        s.c2 = -12.0 * d / (te * te * te) + 6.0 * dv / (te * te);
        s.duration = te;
        return s;
    }

    double accel(double t) const { return c1 + c2 * t; }
    double speed(double t) const { return v0 + c1 * t + 0.5 * c2 * t * t; }
    double position(double t) const {
        return x0 + v0 * t + 0.5 * c1 * t * t + c2 * t * t * t / 6.0;
    }
    VehicleState state(double t) const { return {position(t), speed(t)}; }

    /// (1/2) integral of a(t)^2 over [0, duration], in closed form.
    double energy() const {
        const double te = duration;
        return 0.5 * (c1 * c1 * te + c1 * c2 * te * te + c2 * c2 * te * te * te / 3.0);
    }
};

/// (1/2) integral a^2 of the minimum-energy arc between two states over a
/// fixed horizon te, without building the segment:
///   E(te) = 6 d^2/te^3 - 6 d dv/te^2 + 2 dv^2/te,  d = (xe-x0) - v0 te.
inline double min_energy_cost(double x0, double v0, double xe, double ve, double te) {
    if (te <= 0.0) throw std::invalid_argument("min_energy_cost: horizon must be > 0");
    const double d = (xe - x0) - v0 * te;
    const double dv = ve - v0;
    return 6.0 * d * d / (te * te * te) - 6.0 * d * dv / (te * te) + 2.0 * dv * dv / te;
}

}  // namespace glosa
