#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "glosa/scenario.hpp"

namespace glosa {

/// Node lattice for the discrete solvers. Accelerations and speeds share the
/// base interval (delta_v = delta_a * T) and positions use
/// delta_x = (1/2) delta_a T^2, which closes the lattice under the kinematics:
/// stepping from any node with any on-grid control lands on a node.
///
/// Index maps: x = x_min + ix*delta_x, v = v_min + iv*delta_v,
/// a = (a_lo_steps + ia)*delta_a. Successor offsets are the integers
///   iv' = iv + (a_lo_steps + ia)
///   ix' = ix + 2*iv + c0 + (a_lo_steps + ia),  c0 = 2*v_min/(delta_a*T).
class Grid {
  public:
    Grid(const Scenario& sc, double delta_a) : delta_a_(delta_a), T_(sc.T) {
        if (!(delta_a > 0.0)) throw std::invalid_argument("Grid: delta must be > 0");
        delta_v_ = delta_a * T_;
        delta_x_ = 0.5 * delta_a * T_ * T_;
        x_min_ = sc.bounds.x_min;
        v_min_ = sc.bounds.v_min;
        const double tol = 1e-9;
        nx_ = int(std::floor((sc.x_upper() - x_min_) / delta_x_ + tol)) + 1;
        nv_ = int(std::floor((sc.bounds.v_max - v_min_) / delta_v_ + tol)) + 1;
        if (nx_ < 1 || nv_ < 1) throw std::invalid_argument("Grid: empty state domain");

        a_lo_steps_ = int(std::ceil(sc.bounds.a_min / delta_a - tol));
        const int a_hi_steps = int(std::floor(sc.bounds.a_max / delta_a + tol));
        na_ = a_hi_steps - a_lo_steps_ + 1;
        if (na_ < 1) throw std::invalid_argument("Grid: empty control set");
        if (std::abs(a_lo_steps_ * delta_a - sc.bounds.a_min) > 1e-9 ||
            std::abs(a_hi_steps * delta_a - sc.bounds.a_max) > 1e-9)
            warnings_.push_back("control bounds snapped inward to the delta_a lattice");

        const double c0 = 2.0 * v_min_ / (delta_a * T_);
        c0_ = int(std::llround(c0));
        if (std::abs(c0 - c0_) > 1e-9)
            throw std::invalid_argument("Grid: v_min breaks lattice closure (must be a multiple "
                                        "of delta_a*T/2)");

        ix0_ = snap_index((sc.x0 - x_min_) / delta_x_, nx_, x0_snap_);
        x0_snap_ *= delta_x_;
        iv0_ = snap_index((sc.v0 - v_min_) / delta_v_, nv_, v0_snap_);
        v0_snap_ *= delta_v_;
        if (x0_snap_ > 1e-9 || v0_snap_ > 1e-9)
            warnings_.push_back("initial state snapped to the nearest grid node");
    }

    double delta_a() const { return delta_a_; }
    double delta_v() const { return delta_v_; }
    double delta_x() const { return delta_x_; }
    int nx() const { return nx_; }
    int nv() const { return nv_; }
    int na() const { return na_; }

    double x_at(int ix) const { return x_min_ + ix * delta_x_; }
    double v_at(int iv) const { return v_min_ + iv * delta_v_; }
    double a_at(int ia) const { return (a_lo_steps_ + ia) * delta_a_; }

    int x_index(double x) const { return int(std::llround((x - x_min_) / delta_x_)); }
    int v_index(double v) const { return int(std::llround((v - v_min_) / delta_v_)); }
    bool on_x_node(double x, double tol = 1e-9) const {
        const int i = x_index(x);
        return i >= 0 && i < nx_ && std::abs(x_at(i) - x) <= tol;
    }
    bool on_v_node(double v, double tol = 1e-9) const {
        const int i = v_index(v);
        return i >= 0 && i < nv_ && std::abs(v_at(i) - v) <= tol;
    }

    /// Successor index offsets for control index ia.
    int voff(int ia) const { return a_lo_steps_ + ia; }
    int xoff(int iv, int ia) const { return c0_ + 2 * iv + a_lo_steps_ + ia; }

    int ix0() const { return ix0_; }
    int iv0() const { return iv0_; }
    double x0_snap_distance() const { return x0_snap_; }
    double v0_snap_distance() const { return v0_snap_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    static int snap_index(double raw, int count, double& dist) {
        int i = int(std::llround(raw));
        if (i < 0) i = 0;
        if (i > count - 1) i = count - 1;
        dist = std::abs(raw - i);
        return i;
    }

    double delta_a_ = 0.0, delta_v_ = 0.0, delta_x_ = 0.0, T_ = 1.0;
    double x_min_ = 0.0, v_min_ = 0.0;
    int nx_ = 0, nv_ = 0, na_ = 0;
    int a_lo_steps_ = 0, c0_ = 0;
    int ix0_ = 0, iv0_ = 0;
    double x0_snap_ = 0.0, v0_snap_ = 0.0;
    std::vector<std::string> warnings_;
};

}  // namespace glosa
