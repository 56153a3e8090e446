#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace glosa {

/// Longitudinal vehicle state: position x (m) and speed v (m/s).
struct VehicleState {
    double x = 0.0;
    double v = 0.0;
};

/// Box bounds on states and control.
struct Bounds {
    double x_min = 0.0, x_max = 0.0;
    double v_min = 0.0, v_max = 0.0;
    double a_min = 0.0, a_max = 0.0;
};

/// One step of the discrete double-integrator kinematics with piecewise
/// constant acceleration a over a period of length T.
inline VehicleState step_kinematics(const VehicleState& s, double a, double T) {
    if (T <= 0.0) throw std::invalid_argument("step_kinematics: T must be > 0");
    return {s.x + s.v * T + 0.5 * a * T * T, s.v + a * T};
}

/// Time-indexed state/control sequence. states has one more entry than
/// controls; states[k+1] = step_kinematics(states[k], controls[k], T).
struct Trajectory {
    std::vector<VehicleState> states;
    std::vector<double> controls;
    double cost = 0.0;

    std::size_t horizon() const { return controls.size(); }
};

/// Simulate forward from (x0, v0) under the given control sequence.
inline Trajectory simulate_controls(VehicleState start, const std::vector<double>& controls,
                                    double T) {
    Trajectory traj;
    traj.states.reserve(controls.size() + 1);
    traj.controls = controls;
    traj.states.push_back(start);
    for (double a : controls) traj.states.push_back(step_kinematics(traj.states.back(), a, T));
    return traj;
}

inline bool within(double v, double lo, double hi, double tol = 0.0) {
    return v >= lo - tol && v <= hi + tol;
}

}  // namespace glosa
