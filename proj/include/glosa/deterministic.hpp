#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "glosa/cubic.hpp"
#include "glosa/scalar_opt.hpp"
#include "glosa/scenario.hpp"
#include "glosa/types.hpp"

namespace glosa {

struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed-form deterministic solution: one cubic arc when the signal
/// constraint is inactive, two arcs joined at the signal when it binds.
struct DeterministicSolution {
    double te = 0.0;                    // total horizon
    double cost = 0.0;                  // w*te + (1/2) integral a^2
    std::optional<double> t_signal;     // crossing time of x1, when known
    bool constraint_active = false;     // two-segment solution
    bool position_overshoot = false;    // segment transiently exceeds x1
    std::vector<CubicSegment> segments; // local clocks; durations sum to te

    VehicleState state_at(double t) const {
        double left = t;
        for (const auto& seg : segments) {
            if (left <= seg.duration || &seg == &segments.back()) return seg.state(left);
            left -= seg.duration;
        }
        throw std::logic_error("DeterministicSolution: empty solution");
    }

    double accel_at(double t) const {
        double left = t;
        for (const auto& seg : segments) {
            if (left <= seg.duration || &seg == &segments.back()) return seg.accel(left);
            left -= seg.duration;
        }
        throw std::logic_error("DeterministicSolution: empty solution");
    }
};

namespace detail {

/// Search bracket for the free final time; the left edge doubles as the
/// degenerate "already at the goal" answer.
constexpr double kTeLo = 0.1;
constexpr double kTeHi = 200.0;
constexpr double kTeTol = 1e-6;

/// First time at which the arc reaches position x1 (sampling plus bisection;
/// the cubic may be non-monotone).
inline std::optional<double> first_crossing(const CubicSegment& seg, double x1) {
    const int n = 256;
    double prev_t = 0.0, prev_g = seg.position(0.0) - x1;
    if (prev_g >= 0.0) return 0.0;
    for (int i = 1; i <= n; ++i) {
        const double t = seg.duration * double(i) / n;
        const double g = seg.position(t) - x1;
        if (g >= 0.0) {
            double lo = prev_t, hi = t;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (seg.position(mid) - x1 < 0.0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_t = t;
        prev_g = g;
    }
    return std::nullopt;
}

}  // namespace detail

/// Free-horizon minimum of w*te + E(te) from `state` to `target`, by coarse
/// scan plus golden section on te in [0.1, 200] s.
inline DeterministicSolution unconstrained_glosa(VehicleState state, VehicleState target,
                                                 double w) {
    if (!(w > 0.0)) throw std::invalid_argument("unconstrained_glosa: w must be > 0");
    auto obj = [&](double te) {
        return w * te + min_energy_cost(state.x, state.v, target.x, target.v, te);
    };
    const ScalarMin m = minimize_scalar(obj, detail::kTeLo, detail::kTeHi, detail::kTeTol);
    if (m.at_upper_edge)
        throw BracketError("unconstrained_glosa: no finite minimizer within the te bracket");
    DeterministicSolution sol;
    sol.te = m.arg;
    sol.cost = m.value;
    sol.segments.push_back(CubicSegment::between(state, target, sol.te));
    return sol;
}

/// Deterministic GLOSA with a known green time t1: the vehicle may not pass
/// x1 earlier. If the unconstrained crossing already satisfies t_S >= t1 the
/// constraint is inactive; otherwise the solution crosses x1 exactly at t1
/// with the crossing speed chosen by an outer golden-section search (the
/// inner remaining-horizon problem is again unconstrained GLOSA).
inline DeterministicSolution constrained_glosa(const Scenario& sc, double t1) {
    if (sc.x0 > sc.x1)
        throw std::invalid_argument("constrained_glosa: initial position beyond the signal");
    DeterministicSolution un = unconstrained_glosa(sc.initial(), sc.target(), sc.w);
    auto cross = detail::first_crossing(un.segments.front(), sc.x1);
    if (t1 <= 0.0 || (cross && *cross >= t1)) {
        un.t_signal = cross ? std::optional<double>(*cross) : std::nullopt;
        return un;
    }

    auto through = [&](double vS) {
        const double e1 = min_energy_cost(sc.x0, sc.v0, sc.x1, vS, t1);
        const DeterministicSolution rest = unconstrained_glosa({sc.x1, vS}, sc.target(), sc.w);
        return e1 + sc.w * t1 + rest.cost;
    };
    const ScalarMin m = minimize_scalar(through, 0.0, sc.bounds.v_max, 1e-6, 96, false);
    const double vS = m.arg;

    DeterministicSolution sol;
    sol.constraint_active = true;
    sol.t_signal = t1;
    sol.segments.push_back(CubicSegment::between(sc.initial(), {sc.x1, vS}, t1));
    const DeterministicSolution rest = unconstrained_glosa({sc.x1, vS}, sc.target(), sc.w);
    sol.segments.push_back(rest.segments.front());
    sol.te = t1 + rest.te;
    sol.cost = sol.segments[0].energy() + sc.w * sol.te + rest.segments.front().energy();
    for (int i = 0; i <= 64; ++i) {
        if (sol.segments[0].position(t1 * i / 64.0) > sc.x1 + 1e-9) {
            sol.position_overshoot = true;
            break;
        }
    }
    return sol;
}

}  // namespace glosa
