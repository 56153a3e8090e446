#pragma once

#include <string>
#include <vector>

#include "glosa/prior.hpp"
#include "glosa/types.hpp"

namespace glosa {

/// Full problem instance: endpoints, signal position, time weight, time step,
/// state/control box and the switching-time prior.
struct Scenario {
    std::string id = "scenario";
    double x0 = 0.0, v0 = 0.0;   // initial state
    double xe = 0.0, ve = 0.0;   // fixed final state
    double x1 = 0.0;             // signal position
    double w = 0.1;              // time weight
    double T = 1.0;              // time step
    Bounds bounds;
    SwitchingPrior prior;

    VehicleState initial() const { return {x0, v0}; }
    VehicleState target() const { return {xe, ve}; }
    int horizon() const { return prior.k_max(); }

    /// Pre-switch position ceiling: the vehicle may not pass the signal while
    /// the light is red, so the effective upper bound is min(x_max, x1).
    double x_upper() const { return bounds.x_max < x1 ? bounds.x_max : x1; }
};

/// Check every Scenario invariant; returns one message per violation.
inline std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> v;
    auto bad = [&](const std::string& m) { v.push_back(m); };
    if (!(s.x0 <= s.x1 && s.x1 <= s.xe)) bad("x0 <= x1 <= xe");
    if (!(s.w > 0.0)) bad("w > 0");
    if (!(s.T > 0.0)) bad("T > 0");
    if (!(s.bounds.a_min < 0.0 && 0.0 < s.bounds.a_max)) bad("a_min < 0 < a_max");
    if (!(s.bounds.v_min >= 0.0)) bad("v_min >= 0");
    if (!(s.bounds.x_min <= s.bounds.x_max)) bad("x_min <= x_max");
    if (!(s.bounds.v_min <= s.bounds.v_max)) bad("v_min <= v_max");
    if (!within(s.x0, s.bounds.x_min, s.bounds.x_max)) bad("x0 inside [x_min, x_max]");
    if (!within(s.v0, s.bounds.v_min, s.bounds.v_max)) bad("v0 inside [v_min, v_max]");
    if (s.prior.k_min() < 1) bad("k_min >= 1");
    return v;
}

}  // namespace glosa
